#include <doctest.h>

#include "capcot/errors.hpp"
#include "capcot/eval.hpp"
#include "capcot/parse.hpp"
#include "capcot/prompt.hpp"
#include "capcot/scripted_backend.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace capcot;

namespace {

const std::string kFixtures = FIXTURES_DIR;

CallContext eval_ctx() {
    CallContext ctx;
    ctx.model = "offline";
    ctx.run_id = "eval-test";
    return ctx;
}

ReasoningChain chain_of(const std::string& text) {
    return parse_chain(text, Role::Solver);
}

} // namespace

TEST_CASE("load_dataset reads jsonl question/answer records") {
    Dataset ds = load_dataset(kFixtures + "/eval10_dataset.jsonl", DatasetFormat::JsonlQa);
    CHECK(ds.name == "eval10_dataset");
    CHECK(ds.items.size() == 10);
    CHECK(ds.rejects.empty());
    CHECK(ds.items[0].id == "e1");
    CHECK(ds.items[0].answer_kind == AnswerKind::Numeric);
    CHECK(ds.items[4].answer_kind == AnswerKind::ExpressionSet);
    REQUIRE(ds.items[4].gold.has_value());
    CHECK(ds.items[4].gold->canonical.values == std::vector<double>{2.0, 5.0});
}

TEST_CASE("load_dataset reads gsm8k-style answer markers and collects rejects") {
    Dataset ds = load_dataset(kFixtures + "/gsm8k_sample.jsonl", DatasetFormat::Gsm8k);
    CHECK(ds.items.size() == 2);
    REQUIRE(ds.rejects.size() == 1);  // third record has no answer field
    CHECK(ds.rejects[0].find("line 3") != std::string::npos);
    CHECK(ds.items[0].gold->canonical.number == doctest::Approx(72.0));
    CHECK(ds.items[1].gold->canonical.number == doctest::Approx(10.0));
}

TEST_CASE("load_dataset honours the limit and rejects missing files") {
    Dataset ds =
        load_dataset(kFixtures + "/eval10_dataset.jsonl", DatasetFormat::JsonlQa, 4);
    CHECK(ds.items.size() == 4);
    CHECK_THROWS_AS(load_dataset(kFixtures + "/no_such_file.jsonl", DatasetFormat::JsonlQa),
                    UnreadableFile);
}

TEST_CASE("score distinguishes correct, incorrect, and unscorable") {
    GoldAnswer gold{normalize_answer("42", AnswerKind::Numeric)};
    CHECK(score(chain_of("(1) Work.\nAnswer: 42"), gold, AnswerKind::Numeric) ==
          ScoreResult::Correct);
    CHECK(score(chain_of("(1) Work.\nAnswer: 41"), gold, AnswerKind::Numeric) ==
          ScoreResult::Incorrect);
    CHECK(score(chain_of(""), gold, AnswerKind::Numeric) == ScoreResult::Unscorable);
    CHECK(score(chain_of("(1) Reason carefully.\nI am not sure about this one."), gold,
                AnswerKind::Numeric) == ScoreResult::Unscorable);
}

TEST_CASE("score applies the numeric tolerance") {
    GoldAnswer gold{normalize_answer("33.3", AnswerKind::Numeric)};
    CHECK(score(chain_of("Answer: 33.30001"), gold, AnswerKind::Numeric, 1e-3) ==
          ScoreResult::Correct);
    CHECK(score(chain_of("Answer: 33.35"), gold, AnswerKind::Numeric, 1e-3) ==
          ScoreResult::Incorrect);
    CHECK(score(chain_of("Answer: 33.35"), gold, AnswerKind::Numeric, 0.1) ==
          ScoreResult::Correct);
}

TEST_CASE("mean variation oracles") {
    CHECK(mean_variation({80.0, 80.0, 80.0}) == 0.0);
    // mean 82; absolute deviations 2, 0, 2 -> 4/3
    CHECK(std::fabs(mean_variation({80.0, 82.0, 84.0}) - 4.0 / 3.0) < 1e-9);
    CHECK(mean_variation({}) == 0.0);
    CHECK(mean_variation({7.5}) == 0.0);
    // population standard deviation of {80,82,84}: sqrt(8/3)
    CHECK(mean_variation({80.0, 82.0, 84.0}, true) ==
          doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("mean variation is invariant under translation") {
    std::vector<double> base = {61.2, 58.9, 60.4, 64.0, 59.7};
    std::vector<double> shifted;
    for (double v : base) shifted.push_back(v + 100.0);
    CHECK(mean_variation(base) == doctest::Approx(mean_variation(shifted)).epsilon(1e-12));
    CHECK(mean_variation(base, true) ==
          doctest::Approx(mean_variation(shifted, true)).epsilon(1e-12));
}

TEST_CASE("evaluate on the ten-item fixture scores exactly 0.7") {
    Dataset ds = load_dataset(kFixtures + "/eval10_dataset.jsonl", DatasetFormat::JsonlQa);
    ScriptedBackend sb =
        ScriptedBackend::from_file(kFixtures + "/eval10_script.json");

    EvalOptions opts;
    opts.runs = 3;
    EvalResult r = evaluate(default_solver_prompt(), ds, opts, eval_ctx(), sb);

    REQUIRE(r.run_accuracies.size() == 3);
    for (double a : r.run_accuracies) CHECK(a == 0.7);  // exact: 7 of 10
    CHECK(r.mean_accuracy == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(r.mean_variation_pp == 0.0);  // identical runs are perfectly stable
    CHECK(sb.call_count() == 30);       // 3 runs x 10 questions, solver only
    CHECK(sb.call_count(Role::Challenger) == 0);
    CHECK(sb.call_count(Role::Feedback) == 0);
}

namespace {

/// Backend whose correctness depends on the requested temperature: correct
/// below 0.5, wrong at or above. Used to exercise sweep drift.
struct TemperatureSensitiveBackend : Backend {
    CompletionResponse complete(const CompletionRequest& req) override {
        CompletionResponse resp;
        resp.content = req.decoding.temperature < 0.5 ? "(1) Steady.\nAnswer: 42"
                                                      : "(1) Wandering.\nAnswer: 17";
        resp.usage = {1, 1};
        return resp;
    }
};

} // namespace

TEST_CASE("temperature sweep covers the full grid") {
    std::vector<double> grid = default_temperature_grid();
    REQUIRE(grid.size() == 11);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(grid[i] == doctest::Approx(static_cast<double>(i) / 10.0));
}

TEST_CASE("a temperature-insensitive backend sweeps with zero variation") {
    Dataset ds = load_dataset(kFixtures + "/eval10_dataset.jsonl", DatasetFormat::JsonlQa);
    ScriptedBackend sb =
        ScriptedBackend::from_file(kFixtures + "/eval10_script.json");

    EvalOptions opts;
    SweepResult sweep = temperature_sweep(default_solver_prompt(), ds,
                                          default_temperature_grid(), 1, opts,
                                          eval_ctx(), sb);
    REQUIRE(sweep.points.size() == 11);
    for (const auto& p : sweep.points) CHECK(p.mean_accuracy == 0.7);
    CHECK(sweep.mean_variation_pp == 0.0);
}

TEST_CASE("a temperature-sensitive backend shows the expected drift") {
    Dataset ds;
    ds.name = "single";
    Query q;
    q.id = "q1";
    q.text = "What is the answer?";
    q.answer_kind = AnswerKind::Numeric;
    q.gold = GoldAnswer{normalize_answer("42", AnswerKind::Numeric)};
    ds.items = {q};

    TemperatureSensitiveBackend be;
    EvalOptions opts;
    SweepResult sweep = temperature_sweep(default_solver_prompt(), ds,
                                          default_temperature_grid(), 1, opts,
                                          eval_ctx(), be);
    // five grid points (0.0..0.4) land below the flip point and score 100,
    // the remaining six score 0
    int perfect = 0;
    for (const auto& p : sweep.points) perfect += p.mean_accuracy == 1.0 ? 1 : 0;
    CHECK(perfect == 5);
    double mean = 500.0 / 11.0;
    double mad = (5.0 * (100.0 - mean) + 6.0 * mean) / 11.0;
    CHECK(sweep.mean_variation_pp == doctest::Approx(mad).epsilon(1e-12));
}

TEST_CASE("sweep rejects out-of-range grids") {
    Dataset ds;
    ds.name = "d";
    ds.items = {Query{"q", "t", AnswerKind::FreeText, {}}};
    TemperatureSensitiveBackend be;
    EvalOptions opts;
    CHECK_THROWS_AS(temperature_sweep(default_solver_prompt(), ds, {1.5}, 1, opts,
                                      eval_ctx(), be),
                    ConfigError);
    CHECK_THROWS_AS(temperature_sweep(default_solver_prompt(), ds, {}, 1, opts,
                                      eval_ctx(), be),
                    ConfigError);
}

TEST_CASE("baseline comparison evaluates both prompts and records their hashes") {
    Dataset ds = load_dataset(kFixtures + "/eval10_dataset.jsonl", DatasetFormat::JsonlQa);
    ScriptedBackend sb =
        ScriptedBackend::from_file(kFixtures + "/eval10_script.json");

    RolePrompt optimized = default_solver_prompt();
    optimized.dynamic_guidelines.push_back("Require a constraint check before concluding.");
    optimized.version = 1;

    EvalOptions opts;
    opts.runs = 1;
    BaselineComparison cmp = cot_baseline(optimized, ds, opts, eval_ctx(), sb);

    CHECK(cmp.optimized_prompt_hash != cmp.baseline_prompt_hash);
    CHECK(cmp.baseline_prompt_hash == prompt_hash(default_solver_prompt()));
    // the scripted replies ignore the prompt, so both sides score alike here
    CHECK(cmp.optimized.mean_accuracy == cmp.baseline.mean_accuracy);
}

TEST_CASE("eval report serializes and formats without surprises") {
    EvalReport report;
    report.dataset = "eval10_dataset";
    report.prompt_hash = "abc123";
    report.prompt_version = 4;
    report.result.run_accuracies = {0.7, 0.7, 0.7};
    report.result.mean_accuracy = 0.7;
    report.result.mean_variation_pp = 0.0;

    OJson j = to_json(report);
    CHECK(j["dataset"] == "eval10_dataset");
    CHECK(j["result"]["mean_accuracy"] == 0.7);
    CHECK_FALSE(j.contains("sweep"));

    std::string table = format_table(report);
    CHECK(table.find("70.00%") != std::string::npos);
    CHECK(table.find("abc123") != std::string::npos);
}
