#pragma once

#include "capcot/backend.hpp"

#include <chrono>
#include <functional>
#include <string>

namespace capcot {

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds backoff_base{1000};
    double backoff_factor = 2.0;
};

/// Raw transport: takes (url, api key, json body), returns (http status, body).
/// Throwing std::runtime_error signals a transport failure (retried).
using Transport =
    std::function<std::pair<int, std::string>(const std::string& url,
                                              const std::string& api_key,
                                              const std::string& body)>;

/// Default transport backed by cpp-httplib.
Transport httplib_transport(std::chrono::seconds timeout = std::chrono::seconds(120));

/// OpenAI-compatible chat-completions client: POST {endpoint}/v1/chat/completions.
/// Transient failures (connection errors, timeouts, 429/5xx) are retried with
/// exponential backoff; schema mismatches are not.
class HttpBackend : public Backend {
public:
    HttpBackend(std::string endpoint, std::string api_key,
                RetryPolicy retry = {}, Transport transport = httplib_transport());

    CompletionResponse complete(const CompletionRequest& req) override;

    /// Test hook: replaces the real sleep between attempts.
    void set_sleeper(std::function<void(std::chrono::milliseconds)> sleeper);

private:
    std::string endpoint_;
    std::string api_key_;
    RetryPolicy retry_;
    Transport transport_;
    std::function<void(std::chrono::milliseconds)> sleeper_;
};

} // namespace capcot
