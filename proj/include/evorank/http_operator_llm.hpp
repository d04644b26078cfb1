#pragma once

#include <optional>
#include <string>

#include "evorank/http_client.hpp"
#include "evorank/operator_llm.hpp"

namespace evorank {

struct HttpChatConfig {
    HttpConfig http;                 // endpoint should point at .../chat/completions
    std::string model = "llama-3.3-70b-instruct";
    double temperature = 0.7;
    std::optional<std::uint64_t> seed; // passed through when the server supports it
};

// OpenAI-compatible chat-completions client for the operator model. Each
// operator call is a single user message; the raw completion text comes back
// for block parsing.
class HttpChatOperatorLlm : public OperatorLlm {
public:
    explicit HttpChatOperatorLlm(HttpChatConfig config) : config_(std::move(config)) {}

    std::string complete(const OperatorRequest& req) const override {
        nlohmann::json body = {
            {"model", config_.model},
            {"messages", nlohmann::json::array({nlohmann::json{{"role", "user"},
                                                               {"content", req.prompt}}})},
            {"temperature", config_.temperature},
        };
        if (config_.seed) body["seed"] = *config_.seed;

        const std::string describe = std::string(to_string(req.kind)) + " operator call";
        try {
            auto res = detail::post_json_with_retries(config_.http, body.dump(), describe);
            if (res->status != 200) {
                throw operator_error(operator_code::call_failed,
                                     describe + ": HTTP " + std::to_string(res->status));
            }
            const auto parsed = nlohmann::json::parse(res->body);
            return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const backend_error& e) {
            throw operator_error(operator_code::call_failed, e.what());
        } catch (const nlohmann::json::exception& e) {
            throw operator_error(operator_code::call_failed,
                                 describe + ": unparsable response (" + e.what() + ")");
        }
    }

    std::string name() const override { return "http_chat(" + config_.model + ")"; }

private:
    HttpChatConfig config_;
};

} // namespace evorank
