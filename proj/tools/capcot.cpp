#include "capcot/cycle.hpp"
#include "capcot/errors.hpp"
#include "capcot/eval.hpp"
#include "capcot/http_backend.hpp"
#include "capcot/parse.hpp"
#include "capcot/prompt.hpp"
#include "capcot/scripted_backend.hpp"
#include "capcot/sfpr.hpp"
#include "capcot/textutil.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

namespace {

using namespace capcot;

constexpr int kExitOk = 0;
constexpr int kExitBackend = 2;
constexpr int kExitConfig = 3;

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? v : fallback;
}

OJson read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UnreadableFile(path);
    OJson j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return j;
}

Query query_from_config(const OJson& j, std::size_t index) {
    Query q;
    q.id = j.value("id", "q" + std::to_string(index + 1));
    q.text = j.contains("text") ? j["text"].get<std::string>()
                                : j.at("question").get<std::string>();
    std::string kind = j.value("answer_kind", j.value("kind", std::string("free-text")));
    q.answer_kind = answer_kind_from_string(kind);
    if (j.contains("answer"))
        q.gold = GoldAnswer{normalize_answer(j["answer"].get<std::string>(), q.answer_kind)};
    else if (j.contains("gold"))
        q.gold = GoldAnswer{canonical_answer_from_json(j["gold"])};
    return q;
}

struct BackendSpec {
    std::string type;  // "scripted" | "http"
    std::string script_path;
    std::string endpoint;
};

std::unique_ptr<Backend> make_backend(const BackendSpec& spec) {
    if (spec.type == "scripted") {
        if (spec.script_path.empty()) throw ConfigError("scripted backend needs --script");
        return std::make_unique<ScriptedBackend>(ScriptedBackend::from_file(spec.script_path));
    }
    if (spec.type == "http") {
        std::string endpoint = spec.endpoint.empty()
                                   ? env_or("CAPCOT_ENDPOINT", "")
                                   : spec.endpoint;
        if (endpoint.empty())
            throw ConfigError("http backend needs an endpoint (config or CAPCOT_ENDPOINT)");
        // the API key stays in the environment; it is never persisted
        return std::make_unique<HttpBackend>(endpoint, env_or("CAPCOT_API_KEY", ""));
    }
    throw ConfigError("unknown backend type: " + spec.type);
}

std::set<ErrorFamily> parse_taxonomy(const std::string& csv) {
    std::set<ErrorFamily> out;
    std::string cur;
    auto flush = [&] {
        std::string t = text::trim(cur);
        if (!t.empty()) out.insert(error_family_from_string(t));
        cur.clear();
    };
    for (char c : csv) {
        if (c == ',')
            flush();
        else
            cur.push_back(c);
    }
    flush();
    if (out.empty()) throw ConfigError("empty taxonomy");
    return out;
}

// ---------------------------------------------------------------------------

struct OptimizeArgs {
    std::string config_path;
    std::string out_dir;
    int rounds = -1;
    long long seed = -1;
    int cap = -1;
    std::string taxonomy_csv;
    std::string backend_type;
    std::string script_path;
    std::string model;
};

int run_optimize(const OptimizeArgs& args) {
    CycleConfig cfg;
    BackendSpec spec;
    spec.type = "http";
    std::string out_dir = "lineage";

    if (!args.config_path.empty()) {
        OJson j = read_json_file(args.config_path);
        cfg.rounds = j.value("rounds", 3);
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.sfpr_cap = j.value("sfpr_cap", kDefaultGuidelineCap);
        cfg.model = j.value("model", env_or("CAPCOT_MODEL", "offline"));
        if (j.contains("decoding")) cfg.decoding = decoding_from_json(j["decoding"]);
        if (j.contains("taxonomy")) {
            cfg.taxonomy.clear();
            for (const auto& f : j["taxonomy"])
                cfg.taxonomy.insert(error_family_from_string(f.get<std::string>()));
        }
        if (j.contains("queries")) {
            for (std::size_t i = 0; i < j["queries"].size(); ++i)
                cfg.train_queries.push_back(query_from_config(j["queries"][i], i));
        } else if (j.contains("dataset")) {
            const auto& d = j["dataset"];
            Dataset ds = load_dataset(
                d.at("path").get<std::string>(),
                dataset_format_from_string(d.value("format", "jsonl-qa")),
                d.value("limit", std::size_t{0}));
            cfg.train_queries = ds.items;
        }
        if (j.contains("backend")) {
            const auto& b = j["backend"];
            spec.type = b.value("type", "http");
            spec.script_path = b.value("script", "");
            spec.endpoint = b.value("endpoint", "");
        }
        out_dir = j.value("out", out_dir);
    }

    // flags win over config
    if (args.rounds > 0) cfg.rounds = args.rounds;
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
    if (args.cap > 0) cfg.sfpr_cap = args.cap;
    if (!args.taxonomy_csv.empty()) cfg.taxonomy = parse_taxonomy(args.taxonomy_csv);
    if (!args.backend_type.empty()) spec.type = args.backend_type;
    if (!args.script_path.empty()) spec.script_path = args.script_path;
    if (!args.model.empty()) cfg.model = args.model;
    if (!args.out_dir.empty()) out_dir = args.out_dir;

    if (cfg.train_queries.empty())
        throw ConfigError("no training queries (config needs \"queries\" or \"dataset\")");

    auto backend = make_backend(spec);
    PromptLineage lin = run_optimization(cfg, *backend, out_dir);

    std::cout << "run " << lin.run_id << " (" << lin.rounds.size() << " rounds) -> "
              << out_dir << "\n";
    for (const auto& rec : lin.rounds) {
        std::int64_t prompt_toks = 0, completion_toks = 0;
        for (const auto& t : rec.token_records) {
            prompt_toks += t.prompt_tokens;
            completion_toks += t.completion_tokens;
        }
        std::cout << "round " << rec.round << ": P_S v" << rec.after.solver.version
                  << " (" << rec.after.solver.dynamic_guidelines.size() << " guidelines)"
                  << ", P_C v" << rec.after.challenger.version << ", P_D v"
                  << rec.after.feedback.version << ", tokens " << prompt_toks << "+"
                  << completion_toks << "\n";
    }
    std::cout << "final solver prompt: v" << lin.final_solver.version << " ("
              << prompt_hash(lin.final_solver) << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string lineage_dir;
    std::string prompt_file;
    int round = -1;
    std::string dataset_path;
    std::string dataset_format = "jsonl-qa";
    std::size_t limit = 0;
    int runs = 3;
    int runs_per_temp = 1;
    double tolerance = 1e-4;
    bool sweep = false;
    bool baseline = false;
    bool use_stddev = false;
    std::string backend_type = "http";
    std::string script_path;
    std::string model;
    std::string output_format = "json";
};

RolePrompt select_prompt(const EvalArgs& args) {
    if (!args.prompt_file.empty())
        return role_prompt_from_json(read_json_file(args.prompt_file));
    if (args.lineage_dir.empty())
        throw ConfigError("eval needs --lineage or --prompt");
    if (args.round == 0) return default_solver_prompt();
    PromptLineage lin = lineage::load(args.lineage_dir);
    if (args.round < 0) return lin.final_solver;
    for (const auto& rec : lin.rounds)
        if (rec.round == args.round) return rec.after.solver;
    throw MissingLineage(args.lineage_dir + " round " + std::to_string(args.round));
}

int run_eval(const EvalArgs& args) {
    if (args.dataset_path.empty()) throw ConfigError("eval needs --dataset");
    RolePrompt p_s = select_prompt(args);
    Dataset ds = load_dataset(args.dataset_path,
                              dataset_format_from_string(args.dataset_format), args.limit);

    BackendSpec spec;
    spec.type = args.backend_type;
    spec.script_path = args.script_path;
    auto raw_backend = make_backend(spec);
    TokenLedger ledger;
    LedgeredBackend backend(*raw_backend, ledger);

    EvalOptions opts;
    opts.runs = args.runs;
    opts.tolerance = args.tolerance;
    opts.use_stddev = args.use_stddev;

    CallContext ctx;
    ctx.model = args.model.empty() ? env_or("CAPCOT_MODEL", "offline") : args.model;
    ctx.run_id = ds.name;

    EvalReport report;
    report.dataset = ds.name;
    report.prompt_hash = prompt_hash(p_s);
    report.prompt_version = p_s.version;
    report.result = evaluate(p_s, ds, opts, ctx, backend);
    if (args.sweep)
        report.sweep = temperature_sweep(p_s, ds, default_temperature_grid(),
                                         args.runs_per_temp, opts, ctx, backend);
    if (args.baseline) report.baseline = cot_baseline(p_s, ds, opts, ctx, backend);
    report.token_summary = token_report(ledger, GroupBy::Role);

    if (args.output_format == "table")
        std::cout << format_table(report);
    else
        std::cout << to_json(report).dump(2) << "\n";
    if (!ds.rejects.empty())
        std::cerr << ds.rejects.size() << " rejected dataset record(s)\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ShowArgs {
    std::string lineage_dir;
    std::string prompt_role;
    int round = -1;
    int diff_from = -1, diff_to = -1;
    std::string feedback_query;
};

const RolePrompt& pick_role(const RoundPrompts& p, const std::string& role) {
    switch (role_from_string(role)) {
        case Role::Solver: return p.solver;
        case Role::Challenger: return p.challenger;
        case Role::Feedback: return p.feedback;
    }
    return p.solver;
}

int run_show(const ShowArgs& args) {
    PromptLineage lin = lineage::load(args.lineage_dir);

    auto round_record = [&](int r) -> const RoundRecord& {
        for (const auto& rec : lin.rounds)
            if (rec.round == r) return rec;
        throw MissingLineage(args.lineage_dir + " round " + std::to_string(r));
    };

    if (!args.feedback_query.empty()) {
        int r = args.round > 0 ? args.round : static_cast<int>(lin.rounds.size());
        for (const auto& qr : round_record(r).queries) {
            if (qr.query.id == args.feedback_query) {
                std::cout << serialize_feedback(qr.bundle);
                return kExitOk;
            }
        }
        throw MissingLineage("no feedback for query " + args.feedback_query);
    }

    if (args.diff_from >= 0 && args.diff_to >= 0) {
        // round 0 means the pristine prompts the run started from
        auto prompts_at = [&](int r) -> const RoundPrompts& {
            return r == 0 ? round_record(1).before : round_record(r).after;
        };
        const auto& a = prompts_at(args.diff_from);
        const auto& b = prompts_at(args.diff_to);
        auto diff_role = [&](const RolePrompt& pa, const RolePrompt& pb) {
            for (const auto& g : pb.dynamic_guidelines) {
                bool had = false;
                for (const auto& h : pa.dynamic_guidelines)
                    if (h == g) had = true;
                if (!had) std::cout << "  + " << g << "\n";
            }
            for (const auto& g : pa.dynamic_guidelines) {
                bool kept = false;
                for (const auto& h : pb.dynamic_guidelines)
                    if (h == g) kept = true;
                if (!kept) std::cout << "  - " << g << "\n";
            }
        };
        std::cout << "solver v" << a.solver.version << " -> v" << b.solver.version << "\n";
        diff_role(a.solver, b.solver);
        std::cout << "challenger v" << a.challenger.version << " -> v"
                  << b.challenger.version << "\n";
        diff_role(a.challenger, b.challenger);
        if (b.challenger.strategy_slot)
            std::cout << "  strategy: " << b.challenger.strategy_slot->definition << "\n";
        std::cout << "feedback v" << a.feedback.version << " -> v" << b.feedback.version
                  << "\n";
        diff_role(a.feedback, b.feedback);
        return kExitOk;
    }

    if (!args.prompt_role.empty()) {
        RolePrompt p;
        if (args.round == 0)
            p = default_prompt(role_from_string(args.prompt_role));
        else if (args.round > 0)
            p = pick_role(round_record(args.round).after, args.prompt_role);
        else
            p = pick_role(lin.rounds.back().after, args.prompt_role);
        Query placeholder;
        placeholder.text = "{Input Question}";
        std::cout << render_prompt(p, placeholder);
        return kExitOk;
    }

    std::cout << "run " << lin.run_id << ", " << lin.rounds.size() << " round(s)\n";
    for (const auto& rec : lin.rounds)
        std::cout << "round " << rec.round << ": " << rec.queries.size()
                  << " queries, P_S v" << rec.after.solver.version << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CAP-CoT: cycle adversarial prompt optimization for chain-of-thought"};
    app.require_subcommand(1);

    OptimizeArgs opt;
    auto* optimize = app.add_subcommand("optimize", "run optimization rounds");
    optimize->add_option("--config", opt.config_path, "JSON config file");
    optimize->add_option("--rounds", opt.rounds, "number of rounds");
    optimize->add_option("--seed", opt.seed, "RNG seed");
    optimize->add_option("--cap", opt.cap, "dynamic guideline cap");
    optimize->add_option("--taxonomy", opt.taxonomy_csv,
                         "comma-separated cold-start families");
    optimize->add_option("--backend", opt.backend_type, "scripted|http");
    optimize->add_option("--script", opt.script_path, "scripted backend file");
    optimize->add_option("--model", opt.model, "model id");
    optimize->add_option("--out", opt.out_dir, "lineage output directory");

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a solver prompt");
    eval_cmd->add_option("--lineage", ev.lineage_dir, "lineage directory");
    eval_cmd->add_option("--prompt", ev.prompt_file, "prompt JSON file");
    eval_cmd->add_option("--round", ev.round, "prompt version by round (0 = baseline)");
    eval_cmd->add_option("--dataset", ev.dataset_path, "dataset JSONL path");
    eval_cmd->add_option("--dataset-format", ev.dataset_format,
                         "jsonl-qa|gsm8k-style|mc-style");
    eval_cmd->add_option("--limit", ev.limit, "max items");
    eval_cmd->add_option("--runs", ev.runs, "independent runs");
    eval_cmd->add_option("--runs-per-temp", ev.runs_per_temp, "runs per sweep point");
    eval_cmd->add_option("--tolerance", ev.tolerance, "numeric comparison tolerance");
    eval_cmd->add_flag("--sweep", ev.sweep, "temperature sweep 0.0..1.0 step 0.1");
    eval_cmd->add_flag("--baseline", ev.baseline, "compare against the plain CoT prompt");
    eval_cmd->add_flag("--stddev", ev.use_stddev,
                       "standard deviation instead of mean absolute deviation");
    eval_cmd->add_option("--backend", ev.backend_type, "scripted|http");
    eval_cmd->add_option("--script", ev.script_path, "scripted backend file");
    eval_cmd->add_option("--model", ev.model, "model id");
    eval_cmd->add_option("--format", ev.output_format, "json|table");

    ShowArgs sh;
    auto* show = app.add_subcommand("show", "inspect a lineage");
    show->add_option("lineage", sh.lineage_dir, "lineage directory")->required();
    show->add_option("--prompt", sh.prompt_role, "solver|challenger|feedback");
    show->add_option("--round", sh.round, "round selector");
    std::vector<int> diff_pair;
    show->add_option("--diff", diff_pair, "guideline/strategy delta between two rounds")
        ->expected(2);
    show->add_option("--feedback", sh.feedback_query, "print a query's feedback bundle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*optimize) return run_optimize(opt);
        if (*eval_cmd) return run_eval(ev);
        if (*show) {
            if (diff_pair.size() == 2) {
                sh.diff_from = diff_pair[0];
                sh.diff_to = diff_pair[1];
            }
            return run_show(sh);
        }
    } catch (const BackendUnavailable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UnreadableFile& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
