#pragma once

#include "capcot/agents.hpp"
#include "capcot/backend.hpp"
#include "capcot/json_io.hpp"
#include "capcot/types.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace capcot {

struct CycleConfig {
    int rounds = 3;
    std::vector<Query> train_queries;
    std::set<ErrorFamily> taxonomy = {ErrorFamily::Jump, ErrorFamily::Confusion,
                                      ErrorFamily::Fuzzy, ErrorFamily::Wrapper};
    int sfpr_cap = 10;
    DecodingConfig decoding;
    std::uint64_t seed = 0;
    std::string model = "offline";
};

OJson to_json(const CycleConfig& cfg);
CycleConfig cycle_config_from_json(const OJson& j);

/// Stable hash of the canonical config JSON; also the run id.
std::string config_hash(const CycleConfig& cfg);

struct RoundPrompts {
    RolePrompt solver;
    RolePrompt challenger;
    RolePrompt feedback;
    bool operator==(const RoundPrompts&) const = default;
};

struct QueryRecord {
    Query query;
    ErrorStrategy strategy_used;
    ReasoningChain solver_chain;
    ReasoningChain challenger_chain;
    FeedbackBundle bundle;
    std::vector<std::string> flags;
};

struct RoundRecord {
    int round = 1;
    RoundPrompts before;
    RoundPrompts after;
    std::vector<QueryRecord> queries;
    /// Strategy seeding the next round's first challenge.
    std::optional<ErrorStrategy> carry_strategy;
    std::vector<TokenRecord> token_records;
};

OJson to_json(const RoundRecord& r);
RoundRecord round_record_from_json(const OJson& j);

struct PromptLineage {
    std::string run_id;
    CycleConfig config;
    std::vector<RoundRecord> rounds;
    RolePrompt final_solver;
};

/// One optimization round over the training batch: per query in order,
/// strategy pick -> solve -> challenge -> critique -> prompt updates; then
/// feedback self-refinement over the round's ledger.
RoundRecord run_round(RoundPrompts& prompts, std::optional<ErrorStrategy>& carry,
                      int round, const CycleConfig& cfg, Backend& backend,
                      const std::string& run_id);

/// Runs cfg.rounds rounds, persisting the lineage directory after each round.
/// An existing directory with a matching config hash is resumed from the last
/// complete round; a differing hash throws ResumeMismatch.
PromptLineage run_optimization(const CycleConfig& cfg, Backend& backend,
                               const std::string& lineage_dir);

/// Single solver call with the final prompt; no challenger or feedback calls.
ReasoningChain infer(const RolePrompt& p_s, const Query& q, const CallContext& ctx,
                     Backend& backend);

// --- lineage storage -------------------------------------------------------

namespace lineage {

void save_manifest(const std::string& dir, const CycleConfig& cfg,
                   const std::string& run_id);
void save_round(const std::string& dir, const RoundRecord& rec);
void save_final_prompt(const std::string& dir, const RolePrompt& p_s);

/// Loads manifest, all contiguous round files, and the final prompt.
/// Throws MissingLineage when the directory has no manifest.
PromptLineage load(const std::string& dir);

std::string round_file_name(int round);

} // namespace lineage

} // namespace capcot
