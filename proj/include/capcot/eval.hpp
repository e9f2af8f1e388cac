#pragma once

#include "capcot/agents.hpp"
#include "capcot/backend.hpp"
#include "capcot/json_io.hpp"
#include "capcot/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace capcot {

enum class DatasetFormat { JsonlQa, Gsm8k, MultipleChoice };

DatasetFormat dataset_format_from_string(const std::string& s);

struct Dataset {
    std::string name;
    std::vector<Query> items;
    std::string format;
    std::vector<std::string> rejects;  // malformed records, one reason each
};

/// Reads a JSONL file; malformed records land in `rejects` instead of
/// aborting the load. Throws UnreadableFile / EmptyDataset.
Dataset load_dataset(const std::string& path, DatasetFormat format, std::size_t limit = 0);

enum class ScoreResult { Correct, Incorrect, Unscorable };

const char* to_string(ScoreResult r);

/// Compares the chain's extracted answer against gold under the kind's
/// equality. Unscorable (malformed chain, unparseable answer) counts as
/// incorrect in accuracy.
ScoreResult score(const ReasoningChain& chain, const GoldAnswer& gold, AnswerKind kind,
                  double tol = 1e-4);

struct EvalOptions {
    int runs = 3;
    double tolerance = 1e-4;
    bool use_stddev = false;  // mean variation formula switch
};

struct EvalResult {
    std::vector<double> run_accuracies;  // fractions in [0,1]
    double mean_accuracy = 0.0;
    double mean_variation_pp = 0.0;  // percentage points across runs
};

/// `runs` independent inference passes; scripted backends key run r as
/// round r.
EvalResult evaluate(const RolePrompt& p_s, const Dataset& dataset,
                    const EvalOptions& opts, const CallContext& ctx, Backend& backend);

/// Mean absolute deviation from the mean (or standard deviation when
/// use_stddev), in the units of `values`.
double mean_variation(const std::vector<double>& values, bool use_stddev = false);

/// 0.0 .. 1.0 in steps of 0.1 (11 points).
std::vector<double> default_temperature_grid();

struct SweepPoint {
    double temperature = 0.0;
    double mean_accuracy = 0.0;  // fraction
};

struct SweepResult {
    std::vector<SweepPoint> points;
    double mean_variation_pp = 0.0;  // across temperatures
};

SweepResult temperature_sweep(const RolePrompt& p_s, const Dataset& dataset,
                              const std::vector<double>& temps, int runs_per_temp,
                              const EvalOptions& opts, const CallContext& ctx,
                              Backend& backend);

struct BaselineComparison {
    std::string optimized_prompt_hash;
    std::string baseline_prompt_hash;
    EvalResult optimized;
    EvalResult baseline;  // round-0 solver prompt, plain CoT
};

BaselineComparison cot_baseline(const RolePrompt& optimized, const Dataset& dataset,
                                const EvalOptions& opts, const CallContext& ctx,
                                Backend& backend);

struct EvalReport {
    std::string dataset;
    std::string prompt_hash;
    int prompt_version = 0;
    EvalResult result;
    std::optional<SweepResult> sweep;
    std::optional<BaselineComparison> baseline;
    std::vector<TokenReportRow> token_summary;
};

OJson to_json(const EvalReport& report);
std::string format_table(const EvalReport& report);

} // namespace capcot
