#pragma once

#include "capcot/types.hpp"

#include <optional>
#include <string>

namespace capcot {

/// Version-0 role prompts. Base blocks are immutable for the life of a run;
/// only the dynamic guideline section (and the challenger's strategy slot)
/// changes afterwards.
RolePrompt default_solver_prompt();
RolePrompt default_challenger_prompt();
RolePrompt default_feedback_prompt();

RolePrompt default_prompt(Role role);

/// Extra task context for the feedback role: the two chains under comparison.
struct RenderContext {
    std::optional<std::string> solver_chain;
    std::optional<std::string> challenger_chain;
};

/// Deterministic prompt text: base blocks, dynamic guidelines, strategy
/// definition (challenger only), then the task block. Byte-identical output
/// for identical inputs.
std::string render_prompt(const RolePrompt& p, const Query& q,
                          const RenderContext& extra = {});

/// Stable content hash of a prompt's rendered template (no query), used for
/// provenance in reports.
std::string prompt_hash(const RolePrompt& p);

} // namespace capcot
