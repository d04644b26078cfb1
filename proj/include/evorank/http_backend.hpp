#pragma once

#include <string>

#include "evorank/backend.hpp"
#include "evorank/http_client.hpp"

namespace evorank {

// Re-ranker behind a normalized-score wire contract:
//   POST <endpoint>  {"instruction": str, "query": str, "document": str}
//   -> {"score": number in [0, 1]}
// The serving side is responsible for turning model logits or yes/no token
// probabilities into that scalar. 429/5xx and transport errors are retried
// with exponential backoff; other 4xx and malformed bodies are BadResponse.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpConfig config) : config_(std::move(config)) {}

    double score(const ScoreRequest& req) const override {
        const std::string describe =
            "score request (query '" + req.query_id + "', candidate '" + req.candidate_id + "')";
        nlohmann::json body = {
            {"instruction", req.instruction},
            {"query", req.query_text},
            {"document", req.candidate_text},
        };
        auto res = detail::post_json_with_retries(config_, body.dump(), describe);
        if (res->status != 200) {
            throw backend_error(backend_code::bad_response,
                                describe + ": HTTP " + std::to_string(res->status));
        }
        double value = 0.0;
        try {
            const auto parsed = nlohmann::json::parse(res->body);
            value = parsed.at("score").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw backend_error(backend_code::bad_response,
                                describe + ": unparsable response body (" + e.what() + ")");
        }
        if (!(value >= 0.0 && value <= 1.0)) {
            throw backend_error(backend_code::bad_response,
                                describe + ": score " + std::to_string(value) +
                                    " outside [0, 1]");
        }
        return value;
    }

    std::string name() const override { return "http(" + config_.endpoint + ")"; }

private:
    HttpConfig config_;
};

} // namespace evorank
