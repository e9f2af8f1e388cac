#pragma once

#include "capcot/types.hpp"

#include <string>
#include <vector>

namespace capcot {

inline constexpr int kDefaultGuidelineCap = 10;

/// Jaccard threshold above which two guidelines count as paraphrase
/// duplicates.
inline constexpr double kDuplicateJaccard = 0.8;

/// Structured feedback prompt refinement: sentence extraction,
/// instance-detail stripping, imperative rewrite, dedup, FIFO cap.
/// Version bumps by 1 iff the guideline list changed; a no-op returns the
/// prompt unchanged. Base blocks are never touched.
RolePrompt sfpr_refine(const RolePrompt& p, const std::vector<std::string>& directives,
                       int cap = kDefaultGuidelineCap, int round = 1);

/// Installs the strategy (replacing any previous one) and applies any extra
/// directives. Installing a strategy always counts as one version bump.
RolePrompt sfpr_refine_challenger(const RolePrompt& p_c, const ErrorStrategy& strategy,
                                  const std::vector<std::string>& directives = {},
                                  int cap = kDefaultGuidelineCap, int round = 1);

/// Self-refinement for the feedback prompt: at most one corrective guideline
/// per round, derived from format defects recorded in the ledger.
RolePrompt sfpr_refine_self(const RolePrompt& p_d, const FeedbackLedger& ledger,
                            int cap = kDefaultGuidelineCap, int round = 1);

/// The guideline added when a round produced partial or unparseable bundles.
inline constexpr const char* kFormatDisciplineGuideline =
    "Always emit both bracketed output sections.";

} // namespace capcot
