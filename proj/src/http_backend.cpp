#include "capcot/http_backend.hpp"

#include "capcot/errors.hpp"

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace capcot {

namespace {

bool transient_status(int status) {
    return status == 429 || status == 500 || status == 502 || status == 503 ||
           status == 504;
}

// "https://host[:port]" [+ optional path prefix] -> (origin, path_prefix)
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    std::string e = endpoint;
    while (!e.empty() && e.back() == '/') e.pop_back();
    auto scheme = e.find("://");
    auto path_start = e.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) return {e, ""};
    return {e.substr(0, path_start), e.substr(path_start)};
}

} // namespace

Transport httplib_transport(std::chrono::seconds timeout) {
    return [timeout](const std::string& url, const std::string& api_key,
                     const std::string& body) -> std::pair<int, std::string> {
        auto [origin, path] = split_endpoint(url);
        httplib::Client cli(origin);
        cli.set_connection_timeout(timeout);
        cli.set_read_timeout(timeout);
        httplib::Headers headers;
        if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
        auto res = cli.Post(path, headers, body, "application/json");
        if (!res) throw std::runtime_error("transport error: " + httplib::to_string(res.error()));
        return {res->status, res->body};
    };
}

HttpBackend::HttpBackend(std::string endpoint, std::string api_key, RetryPolicy retry,
                         Transport transport)
    : endpoint_(std::move(endpoint)),
      api_key_(std::move(api_key)),
      retry_(retry),
      transport_(std::move(transport)),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

void HttpBackend::set_sleeper(std::function<void(std::chrono::milliseconds)> sleeper) {
    sleeper_ = std::move(sleeper);
}

CompletionResponse HttpBackend::complete(const CompletionRequest& req) {
    const std::string body = serialize_request(req);
    std::string url = endpoint_;
    while (!url.empty() && url.back() == '/') url.pop_back();
    url += "/v1/chat/completions";

    std::string last_error;
    auto backoff = retry_.backoff_base;
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        if (attempt > 1) {
            sleeper_(backoff);
            backoff = std::chrono::milliseconds(static_cast<long long>(
                static_cast<double>(backoff.count()) * retry_.backoff_factor));
        }
        int status = 0;
        std::string resp_body;
        try {
            std::tie(status, resp_body) = transport_(url, api_key_, body);
        } catch (const std::exception& e) {
            last_error = e.what();
            continue;
        }
        if (transient_status(status)) {
            last_error = "http status " + std::to_string(status);
            continue;
        }
        if (status != 200)
            throw InvalidResponse("http status " + std::to_string(status));

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(resp_body);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidResponse(std::string("bad json: ") + e.what());
        }
        try {
            const auto& choice = j.at("choices").at(0);
            CompletionResponse out;
            out.content = choice.at("message").at("content").get<std::string>();
            if (choice.contains("finish_reason") && choice["finish_reason"] == "length")
                out.truncated = true;
            if (j.contains("usage")) {
                out.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
                out.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
            }
            if (out.content.empty() && !out.truncated)
                throw InvalidResponse("empty content without truncation");
            return out;
        } catch (const nlohmann::json::exception& e) {
            throw InvalidResponse(std::string("schema mismatch: ") + e.what());
        }
    }
    throw BackendUnavailable("retries exhausted: " + last_error);
}

} // namespace capcot
