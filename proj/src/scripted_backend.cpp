#include "capcot/scripted_backend.hpp"

#include "capcot/errors.hpp"
#include "capcot/textutil.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace capcot {

void ScriptedBackend::add(Role role, int round, const std::string& query_id,
                          std::string response) {
    script_[{role, round, query_id}] = std::move(response);
}

CompletionResponse ScriptedBackend::complete(const CompletionRequest& req) {
    if (req.messages.empty()) throw InvalidResponse("request has no messages");
    ++calls_;
    ++calls_by_role_[req.tag.role];

    const Key key{req.tag.role, req.tag.round, req.tag.query_id};
    auto it = script_.find(key);
    if (it == script_.end()) {
        throw ScriptMiss(std::string(to_string(req.tag.role)) + "/round " +
                         std::to_string(req.tag.round) + "/" + req.tag.query_id);
    }

    CompletionResponse resp;
    resp.content = it->second;
    std::size_t prompt_tokens = 0;
    for (const auto& m : req.messages)
        prompt_tokens += text::count_whitespace_tokens(m.content);
    resp.usage.prompt_tokens = static_cast<std::int64_t>(prompt_tokens);
    resp.usage.completion_tokens =
        static_cast<std::int64_t>(text::count_whitespace_tokens(resp.content));
    return resp;
}

std::size_t ScriptedBackend::call_count(Role role) const {
    auto it = calls_by_role_.find(role);
    return it == calls_by_role_.end() ? 0 : it->second;
}

void ScriptedBackend::reset_counters() {
    calls_ = 0;
    calls_by_role_.clear();
}

ScriptedBackend ScriptedBackend::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UnreadableFile(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UnreadableFile(path + " (" + e.what() + ")");
    }
    ScriptedBackend b;
    for (const auto& entry : j.at("responses")) {
        b.add(role_from_string(entry.at("role").get<std::string>()),
              entry.at("round").get<int>(),
              entry.at("query_id").get<std::string>(),
              entry.at("text").get<std::string>());
    }
    return b;
}

} // namespace capcot
