#pragma once

#include "capcot/types.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace capcot {

struct DecodingConfig {
    double temperature = 0.0;
    int max_tokens = 2048;
    double frequency_penalty = 0.0;
    double presence_penalty = 0.0;
    bool nucleus_sampling = false;

    bool operator==(const DecodingConfig&) const = default;
};

struct Message {
    std::string role;     // "system" | "user" | "assistant"
    std::string content;
    bool operator==(const Message&) const = default;
};

/// Out-of-band routing info: keys the scripted backend and labels the ledger.
/// Never serialized onto the wire.
struct RequestTag {
    Role role = Role::Solver;
    int round = 1;
    std::string query_id;
    std::string run_id;
};

struct CompletionRequest {
    std::string model;
    std::vector<Message> messages;
    DecodingConfig decoding;
    RequestTag tag;
};

struct Usage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    bool operator==(const Usage&) const = default;
};

struct CompletionResponse {
    std::string content;
    Usage usage;
    bool truncated = false;
};

/// Canonical wire body: OpenAI-style JSON with a stable key order.
std::string serialize_request(const CompletionRequest& req);

class Backend {
public:
    virtual ~Backend() = default;
    virtual CompletionResponse complete(const CompletionRequest& req) = 0;
};

// ---------------------------------------------------------------------------

struct TokenRecord {
    std::string run_id;
    int round = 0;
    Role role = Role::Solver;
    std::string query_id;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;

    bool operator==(const TokenRecord&) const = default;
};

/// Append-only usage ledger. Thread-safe for concurrent producers.
class TokenLedger {
public:
    void append(TokenRecord rec);
    std::vector<TokenRecord> records() const;
    std::int64_t total_prompt_tokens() const;
    std::int64_t total_completion_tokens() const;

private:
    mutable std::mutex mu_;
    std::vector<TokenRecord> records_;
};

enum class GroupBy { Role, Round, Run };

struct TokenReportRow {
    std::string key;
    std::size_t records = 0;
    std::size_t distinct_queries = 0;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::int64_t total_tokens = 0;
    double mean_tokens_per_query = 0.0;
};

/// Exact sums and per-question means per group, rows sorted by key.
std::vector<TokenReportRow> token_report(const TokenLedger& ledger, GroupBy group_by);

/// Wraps a backend so every completion is recorded into the ledger.
class LedgeredBackend : public Backend {
public:
    LedgeredBackend(Backend& inner, TokenLedger& ledger) : inner_(inner), ledger_(ledger) {}
    CompletionResponse complete(const CompletionRequest& req) override;

private:
    Backend& inner_;
    TokenLedger& ledger_;
};

} // namespace capcot
