#pragma once

#include "capcot/backend.hpp"

#include <map>
#include <string>
#include <tuple>

namespace capcot {

/// Offline backend: complete() is a pure lookup on (role, round, query id).
/// Usage counts are whitespace-token counts, so tests can predict them.
/// A missing key throws ScriptMiss, which is how tests detect unexpected
/// agent calls.
class ScriptedBackend : public Backend {
public:
    using Key = std::tuple<Role, int, std::string>;

    ScriptedBackend() = default;
    explicit ScriptedBackend(std::map<Key, std::string> script)
        : script_(std::move(script)) {}

    void add(Role role, int round, const std::string& query_id, std::string response);

    CompletionResponse complete(const CompletionRequest& req) override;

    std::size_t call_count() const { return calls_; }
    std::size_t call_count(Role role) const;
    void reset_counters();

    /// Loads {"responses":[{role, round, query_id, text}, ...]} from disk.
    static ScriptedBackend from_file(const std::string& path);

private:
    std::map<Key, std::string> script_;
    std::size_t calls_ = 0;
    std::map<Role, std::size_t> calls_by_role_;
};

} // namespace capcot
