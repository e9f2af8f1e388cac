#pragma once

#include "capcot/backend.hpp"
#include "capcot/types.hpp"

#include <cstdint>
#include <random>
#include <set>
#include <string>

namespace capcot {

/// Deterministic RNG with portable bounded sampling (no distribution objects,
/// whose output is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 eng_;
};

/// Uniform k in {1,2} (forced to 1 for a singleton taxonomy), then a uniform
/// k-subset of families without replacement.
ErrorStrategy sample_error_strategy(const std::set<ErrorFamily>& taxonomy, Rng& rng);

/// Shared per-call parameters for the three role agents.
struct CallContext {
    std::string model;
    DecodingConfig decoding;
    std::string run_id;
    int round = 1;
};

ReasoningChain solve(const RolePrompt& p_s, const Query& q, const CallContext& ctx,
                     Backend& b);

/// Installs the strategy into a render-time copy of the prompt; the stored
/// challenger prompt is not mutated.
ReasoningChain challenge(const RolePrompt& p_c, const Query& q,
                         const ErrorStrategy& strategy, const CallContext& ctx,
                         Backend& b);

/// One joint comparative call over both chains.
FeedbackBundle critique(const RolePrompt& p_f, const Query& q,
                        const ReasoningChain& c_s, const ReasoningChain& c_c,
                        const CallContext& ctx, Backend& b);

/// Parses bracketed "[Step 1 Output: ...]" / "[Step 2 Output: ...]" sections
/// plus inline "{Chain: ...; Step: t; Issue type: ...; Suggestion: ...}" items.
/// `round` stamps any evolved strategy found in the text.
FeedbackBundle parse_feedback(std::string_view raw, int round);

/// Renders a bundle back into the bracketed two-section layout.
/// parse_feedback(serialize_feedback(b), round) == b for well-formed bundles.
std::string serialize_feedback(const FeedbackBundle& bundle);

} // namespace capcot
