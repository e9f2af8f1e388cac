#pragma once

#include "capcot/types.hpp"

#include <string>
#include <string_view>

namespace capcot {

/// Splits numbered model output into steps and pulls out the final answer.
/// Marker precedence: "(n)" > "n." > "Step n:"; the first scheme matching at
/// least one line wins, and only that scheme is used for the whole chain.
/// Never throws: a chain with no steps and no answer marker comes back with
/// status Malformed and raw_text preserved.
ReasoningChain parse_chain(std::string_view raw, Role source);

/// Joins steps back with the chain's scheme markers. Inverse of parse_chain
/// for canonical inputs (modulo whitespace collapsing).
std::string render_chain(const ReasoningChain& chain);

/// Last "Final answer:" / "Answer:" marker wins; without one, falls back to
/// the trailing numeric token (plus unit words) of the last step.
/// Throws NoAnswerFound on empty input.
std::string extract_final_answer(std::string_view chain_text, AnswerKind kind);

/// Kind-specific canonicalization used for both gold answers and extracted
/// candidate answers. Throws UnparseableAnswer when the kind's grammar fails.
CanonicalAnswer normalize_answer(std::string_view raw, AnswerKind kind);

/// Textual rendering of a canonical answer; normalize_answer of the rendering
/// gives back the same canonical value.
std::string canonical_to_string(const CanonicalAnswer& a);

/// Tolerance-aware equality between canonical answers of the same kind.
bool answers_equal(const CanonicalAnswer& a, const CanonicalAnswer& b, double tol = 1e-4);

/// Dedup key for dynamic guidelines: lowercase, punctuation stripped,
/// whitespace collapsed, tokens sorted (multiset key).
std::string normalize_guideline(std::string_view g);

} // namespace capcot
