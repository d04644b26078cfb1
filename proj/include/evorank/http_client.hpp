#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "evorank/errors.hpp"

namespace evorank {

// Connection parameters shared by the HTTP re-ranker backend and the HTTP
// operator model client.
struct HttpConfig {
    std::string endpoint;      // e.g. http://localhost:8080/score
    int timeout_ms = 30000;
    int max_retries = 3;       // additional attempts after the first
    int backoff_base_ms = 100; // doubled per attempt
    std::string api_key;       // sent as a bearer token when non-empty
};

namespace detail {

// Splits an absolute URL into the scheme://authority base understood by
// httplib::Client and the path part.
inline std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw validation_error(validation_code::invalid_config,
                               "endpoint '" + url + "' is not an absolute URL");
    }
    const auto path_begin = url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) return {url, "/"};
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

inline bool retryable_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

// POSTs a JSON body with exponential backoff on transport errors, 429 and
// 5xx. Non-retryable statuses come back to the caller; exhausting the retry
// budget throws. `describe` names the failing request in error messages.
inline httplib::Result post_json_with_retries(const HttpConfig& config, const std::string& body,
                                              const std::string& describe) {
    const auto [base, path] = split_url(config.endpoint);
    httplib::Client client(base);
    client.set_connection_timeout(std::chrono::milliseconds(config.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(config.timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(config.timeout_ms));
    if (!config.api_key.empty()) client.set_bearer_token_auth(config.api_key);

    std::string last_failure;
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        if (attempt > 0) {
            const auto delay = std::chrono::milliseconds(config.backoff_base_ms << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        auto res = client.Post(path, body, "application/json");
        if (!res) {
            const bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                                   res.error() == httplib::Error::Read ||
                                   res.error() == httplib::Error::Write;
            last_failure = std::string(httplib::to_string(res.error()));
            if (attempt == config.max_retries && timed_out) {
                throw backend_error(backend_code::timeout,
                                    describe + ": timed out after " +
                                        std::to_string(attempt + 1) + " attempts");
            }
            continue;
        }
        if (detail::retryable_status(res->status)) {
            last_failure = "HTTP " + std::to_string(res->status);
            continue;
        }
        return res;
    }
    throw backend_error(backend_code::retries_exhausted,
                        describe + ": retries exhausted (" + last_failure + ")");
}

} // namespace detail

} // namespace evorank
