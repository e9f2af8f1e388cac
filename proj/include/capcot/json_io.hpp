#pragma once

#include "capcot/backend.hpp"
#include "capcot/types.hpp"

#include <nlohmann/json.hpp>

namespace capcot {

/// Canonical serialization: ordered keys, lowercase snake_case field names.
/// This is the lineage-ledger record format.
using OJson = nlohmann::ordered_json;

OJson to_json(const CanonicalAnswer& a);
CanonicalAnswer canonical_answer_from_json(const OJson& j);

OJson to_json(const Query& q);
Query query_from_json(const OJson& j);

OJson to_json(const ErrorStrategy& s);
ErrorStrategy strategy_from_json(const OJson& j);

OJson to_json(const RolePrompt& p);
RolePrompt role_prompt_from_json(const OJson& j);

OJson to_json(const ReasoningChain& c);
ReasoningChain chain_from_json(const OJson& j);

OJson to_json(const FeedbackItem& item);
FeedbackItem feedback_item_from_json(const OJson& j);

OJson to_json(const FeedbackBundle& b);
FeedbackBundle bundle_from_json(const OJson& j);

OJson to_json(const FeedbackLedger& l);
FeedbackLedger ledger_from_json(const OJson& j);

OJson to_json(const DecodingConfig& d);
DecodingConfig decoding_from_json(const OJson& j);

OJson to_json(const TokenRecord& r);
TokenRecord token_record_from_json(const OJson& j);

} // namespace capcot
