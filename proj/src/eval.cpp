#include "capcot/eval.hpp"

#include "capcot/errors.hpp"
#include "capcot/parse.hpp"
#include "capcot/prompt.hpp"
#include "capcot/textutil.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace capcot {

DatasetFormat dataset_format_from_string(const std::string& s) {
    std::string t = text::to_lower(s);
    if (t == "jsonl-qa") return DatasetFormat::JsonlQa;
    if (t == "gsm8k-style" || t == "gsm8k") return DatasetFormat::Gsm8k;
    if (t == "mc-style" || t == "mc") return DatasetFormat::MultipleChoice;
    throw ConfigError("unknown dataset format: " + s);
}

const char* to_string(ScoreResult r) {
    switch (r) {
        case ScoreResult::Correct: return "correct";
        case ScoreResult::Incorrect: return "incorrect";
        case ScoreResult::Unscorable: return "unscorable";
    }
    return "?";
}

namespace {

Query parse_record(const nlohmann::json& j, DatasetFormat format, std::size_t line_no) {
    Query q;
    q.id = j.value("id", "q" + std::to_string(line_no));
    q.text = j.at("question").get<std::string>();
    if (q.text.empty()) throw ConfigError("empty question");

    switch (format) {
        case DatasetFormat::JsonlQa: {
            q.answer_kind = answer_kind_from_string(j.value("kind", "free-text"));
            q.gold = GoldAnswer{
                normalize_answer(j.at("answer").get<std::string>(), q.answer_kind)};
            break;
        }
        case DatasetFormat::Gsm8k: {
            q.answer_kind = AnswerKind::Numeric;
            const std::string ans = j.at("answer").get<std::string>();
            auto pos = ans.rfind("####");
            const std::string tail = pos == std::string::npos ? ans : ans.substr(pos + 4);
            q.gold = GoldAnswer{normalize_answer(tail, AnswerKind::Numeric)};
            break;
        }
        case DatasetFormat::MultipleChoice: {
            q.answer_kind = AnswerKind::MultipleChoice;
            q.gold = GoldAnswer{normalize_answer(j.at("answer").get<std::string>(),
                                                 AnswerKind::MultipleChoice)};
            break;
        }
    }
    return q;
}

} // namespace

Dataset load_dataset(const std::string& path, DatasetFormat format, std::size_t limit) {
    std::ifstream in(path);
    if (!in) throw UnreadableFile(path);

    Dataset ds;
    ds.name = std::filesystem::path(path).stem().string();
    switch (format) {
        case DatasetFormat::JsonlQa: ds.format = "jsonl-qa"; break;
        case DatasetFormat::Gsm8k: ds.format = "gsm8k-style"; break;
        case DatasetFormat::MultipleChoice: ds.format = "mc-style"; break;
    }

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        if (limit > 0 && ds.items.size() >= limit) break;
        try {
            ds.items.push_back(parse_record(nlohmann::json::parse(line), format, line_no));
        } catch (const std::exception& e) {
            ds.rejects.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (ds.items.empty()) throw EmptyDataset(path);
    return ds;
}

ScoreResult score(const ReasoningChain& chain, const GoldAnswer& gold, AnswerKind kind,
                  double tol) {
    if (chain.status == ChainStatus::Malformed || chain.final_answer.empty())
        return ScoreResult::Unscorable;
    try {
        CanonicalAnswer candidate = normalize_answer(chain.final_answer, kind);
        return answers_equal(candidate, gold.canonical, tol) ? ScoreResult::Correct
                                                             : ScoreResult::Incorrect;
    } catch (const UnparseableAnswer&) {
        return ScoreResult::Unscorable;
    }
}

double mean_variation(const std::vector<double>& values, bool use_stddev) {
    if (values.empty()) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values) {
        const double d = v - mean;
        acc += use_stddev ? d * d : std::fabs(d);
    }
    acc /= static_cast<double>(values.size());
    return use_stddev ? std::sqrt(acc) : acc;
}

EvalResult evaluate(const RolePrompt& p_s, const Dataset& dataset, const EvalOptions& opts,
                    const CallContext& ctx, Backend& backend) {
    if (opts.runs < 1) throw ConfigError("runs must be >= 1");

    EvalResult result;
    for (int run = 1; run <= opts.runs; ++run) {
        CallContext run_ctx = ctx;
        run_ctx.round = run;
        if (run_ctx.run_id.empty()) run_ctx.run_id = dataset.name;
        std::size_t correct = 0;
        for (const auto& q : dataset.items) {
            ReasoningChain chain = solve(p_s, q, run_ctx, backend);
            if (q.gold &&
                score(chain, *q.gold, q.answer_kind, opts.tolerance) == ScoreResult::Correct)
                ++correct;
        }
        result.run_accuracies.push_back(static_cast<double>(correct) /
                                        static_cast<double>(dataset.items.size()));
    }
    for (double a : result.run_accuracies) result.mean_accuracy += a;
    result.mean_accuracy /= static_cast<double>(result.run_accuracies.size());

    std::vector<double> pct;
    for (double a : result.run_accuracies) pct.push_back(a * 100.0);
    result.mean_variation_pp = mean_variation(pct, opts.use_stddev);
    return result;
}

std::vector<double> default_temperature_grid() {
    std::vector<double> temps;
    for (int i = 0; i <= 10; ++i) temps.push_back(static_cast<double>(i) / 10.0);
    return temps;
}

SweepResult temperature_sweep(const RolePrompt& p_s, const Dataset& dataset,
                              const std::vector<double>& temps, int runs_per_temp,
                              const EvalOptions& opts, const CallContext& ctx,
                              Backend& backend) {
    if (temps.empty()) throw ConfigError("temperature grid is empty");
    for (double t : temps)
        if (t < 0.0 || t > 1.0) throw ConfigError("temperature out of [0,1]");

    SweepResult sweep;
    std::vector<double> pct;
    for (double t : temps) {
        CallContext temp_ctx = ctx;
        temp_ctx.decoding.temperature = t;
        EvalOptions temp_opts = opts;
        temp_opts.runs = runs_per_temp;
        EvalResult r = evaluate(p_s, dataset, temp_opts, temp_ctx, backend);
        sweep.points.push_back({t, r.mean_accuracy});
        pct.push_back(r.mean_accuracy * 100.0);
    }
    sweep.mean_variation_pp = mean_variation(pct, opts.use_stddev);
    return sweep;
}

BaselineComparison cot_baseline(const RolePrompt& optimized, const Dataset& dataset,
                                const EvalOptions& opts, const CallContext& ctx,
                                Backend& backend) {
    BaselineComparison cmp;
    const RolePrompt baseline = default_solver_prompt();
    cmp.optimized_prompt_hash = prompt_hash(optimized);
    cmp.baseline_prompt_hash = prompt_hash(baseline);
    cmp.optimized = evaluate(optimized, dataset, opts, ctx, backend);
    cmp.baseline = evaluate(baseline, dataset, opts, ctx, backend);
    return cmp;
}

namespace {

OJson to_json(const EvalResult& r) {
    OJson j;
    j["run_accuracies"] = r.run_accuracies;
    j["mean_accuracy"] = r.mean_accuracy;
    j["mean_variation_pp"] = r.mean_variation_pp;
    return j;
}

} // namespace

OJson to_json(const EvalReport& report) {
    OJson j;
    j["dataset"] = report.dataset;
    j["prompt_hash"] = report.prompt_hash;
    j["prompt_version"] = report.prompt_version;
    j["result"] = to_json(report.result);
    if (report.sweep) {
        OJson js;
        js["points"] = OJson::array();
        for (const auto& p : report.sweep->points)
            js["points"].push_back(
                {{"temperature", p.temperature}, {"mean_accuracy", p.mean_accuracy}});
        js["mean_variation_pp"] = report.sweep->mean_variation_pp;
        j["sweep"] = std::move(js);
    }
    if (report.baseline) {
        OJson jb;
        jb["optimized_prompt_hash"] = report.baseline->optimized_prompt_hash;
        jb["baseline_prompt_hash"] = report.baseline->baseline_prompt_hash;
        jb["optimized"] = to_json(report.baseline->optimized);
        jb["baseline"] = to_json(report.baseline->baseline);
        j["baseline"] = std::move(jb);
    }
    j["token_summary"] = OJson::array();
    for (const auto& row : report.token_summary) {
        j["token_summary"].push_back({{"key", row.key},
                                      {"records", row.records},
                                      {"distinct_queries", row.distinct_queries},
                                      {"prompt_tokens", row.prompt_tokens},
                                      {"completion_tokens", row.completion_tokens},
                                      {"total_tokens", row.total_tokens},
                                      {"mean_tokens_per_query", row.mean_tokens_per_query}});
    }
    return j;
}

std::string format_table(const EvalReport& report) {
    std::ostringstream ss;
    char buf[128];
    ss << "dataset: " << report.dataset << "\n";
    ss << "prompt: v" << report.prompt_version << " (" << report.prompt_hash << ")\n";
    ss << "run accuracies:";
    for (double a : report.result.run_accuracies) {
        std::snprintf(buf, sizeof(buf), " %.2f%%", a * 100.0);
        ss << buf;
    }
    std::snprintf(buf, sizeof(buf), "\nmean accuracy: %.2f%%\nmean variation: %.4f pp\n",
                  report.result.mean_accuracy * 100.0, report.result.mean_variation_pp);
    ss << buf;
    if (report.sweep) {
        ss << "temperature sweep:\n";
        for (const auto& p : report.sweep->points) {
            std::snprintf(buf, sizeof(buf), "  T=%.1f  acc=%.2f%%\n", p.temperature,
                          p.mean_accuracy * 100.0);
            ss << buf;
        }
        std::snprintf(buf, sizeof(buf), "  sweep mean variation: %.4f pp\n",
                      report.sweep->mean_variation_pp);
        ss << buf;
    }
    if (report.baseline) {
        std::snprintf(buf, sizeof(buf),
                      "baseline (CoT, %s): %.2f%%  vs optimized (%s): %.2f%%\n",
                      report.baseline->baseline_prompt_hash.c_str(),
                      report.baseline->baseline.mean_accuracy * 100.0,
                      report.baseline->optimized_prompt_hash.c_str(),
                      report.baseline->optimized.mean_accuracy * 100.0);
        ss << buf;
    }
    if (!report.token_summary.empty()) {
        ss << "token usage:\n";
        for (const auto& row : report.token_summary) {
            std::snprintf(buf, sizeof(buf),
                          "  %-12s prompt=%lld completion=%lld mean/question=%.1f\n",
                          row.key.c_str(), static_cast<long long>(row.prompt_tokens),
                          static_cast<long long>(row.completion_tokens),
                          row.mean_tokens_per_query);
            ss << buf;
        }
    }
    return ss.str();
}

} // namespace capcot
