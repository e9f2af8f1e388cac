#include "capcot/backend.hpp"

#include "capcot/errors.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

namespace capcot {

std::string serialize_request(const CompletionRequest& req) {
    if (req.messages.empty()) throw InvalidResponse("request has no messages");
    nlohmann::ordered_json body;
    body["model"] = req.model;
    body["messages"] = nlohmann::ordered_json::array();
    for (const auto& m : req.messages)
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    body["temperature"] = req.decoding.temperature;
    body["max_tokens"] = req.decoding.max_tokens;
    body["frequency_penalty"] = req.decoding.frequency_penalty;
    body["presence_penalty"] = req.decoding.presence_penalty;
    return body.dump();
}

void TokenLedger::append(TokenRecord rec) {
    std::lock_guard<std::mutex> lock(mu_);
    records_.push_back(std::move(rec));
}

std::vector<TokenRecord> TokenLedger::records() const {
    std::lock_guard<std::mutex> lock(mu_);
    return records_;
}

std::int64_t TokenLedger::total_prompt_tokens() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::int64_t total = 0;
    for (const auto& r : records_) total += r.prompt_tokens;
    return total;
}

std::int64_t TokenLedger::total_completion_tokens() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::int64_t total = 0;
    for (const auto& r : records_) total += r.completion_tokens;
    return total;
}

std::vector<TokenReportRow> token_report(const TokenLedger& ledger, GroupBy group_by) {
    struct Acc {
        std::size_t records = 0;
        std::set<std::string> queries;
        std::int64_t prompt = 0;
        std::int64_t completion = 0;
    };
    std::map<std::string, Acc> groups;
    for (const auto& r : ledger.records()) {
        std::string key;
        switch (group_by) {
            case GroupBy::Role: key = to_string(r.role); break;
            case GroupBy::Round: key = std::to_string(r.round); break;
            case GroupBy::Run: key = r.run_id; break;
        }
        auto& acc = groups[key];
        ++acc.records;
        acc.queries.insert(r.query_id);
        acc.prompt += r.prompt_tokens;
        acc.completion += r.completion_tokens;
    }
    std::vector<TokenReportRow> rows;
    for (const auto& [key, acc] : groups) {
        TokenReportRow row;
        row.key = key;
        row.records = acc.records;
        row.distinct_queries = acc.queries.size();
        row.prompt_tokens = acc.prompt;
        row.completion_tokens = acc.completion;
        row.total_tokens = acc.prompt + acc.completion;
        row.mean_tokens_per_query =
            acc.queries.empty() ? 0.0
                                : static_cast<double>(row.total_tokens) /
                                      static_cast<double>(acc.queries.size());
        rows.push_back(std::move(row));
    }
    return rows;  // std::map iteration gives stable key order
}

CompletionResponse LedgeredBackend::complete(const CompletionRequest& req) {
    CompletionResponse resp = inner_.complete(req);
    TokenRecord rec;
    rec.run_id = req.tag.run_id;
    rec.round = req.tag.round;
    rec.role = req.tag.role;
    rec.query_id = req.tag.query_id;
    rec.prompt_tokens = resp.usage.prompt_tokens;
    rec.completion_tokens = resp.usage.completion_tokens;
    ledger_.append(std::move(rec));
    return resp;
}

} // namespace capcot
