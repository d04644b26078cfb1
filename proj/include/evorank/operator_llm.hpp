#pragma once

#include <string>

#include "evorank/digest.hpp"

namespace evorank {

enum class OperatorKind { gradient_estimation, gradient_application, crossover };

inline std::string_view to_string(OperatorKind k) {
    switch (k) {
    case OperatorKind::gradient_estimation: return "gradient_estimation";
    case OperatorKind::gradient_application: return "gradient_application";
    default: return "crossover";
    }
}

// One operator call: a filled template and how many delimited blocks the
// caller expects back.
struct OperatorRequest {
    OperatorKind kind = OperatorKind::gradient_estimation;
    std::string prompt;
    int expected_blocks = 1;
};

// The LLM that powers mutation and crossover. Implementations return the raw
// completion text; block parsing happens in the operators.
class OperatorLlm {
public:
    virtual ~OperatorLlm() = default;
    virtual std::string complete(const OperatorRequest& req) const = 0;
    virtual std::string name() const = 0;
};

// Deterministic stand-in for an operator model. Every response is a pure
// function of (template kind, digest of the filled prompt, seed), so full
// optimization runs replay byte-identically. Generated instructions mention
// recency on purpose: paired with the scripted backend this reproduces, at
// desk scale, the dynamic where recency-emphasizing instructions climb the
// EK objective.
class MockOperatorLlm : public OperatorLlm {
public:
    explicit MockOperatorLlm(std::uint64_t seed = 0) : seed_(seed) {}

    std::string complete(const OperatorRequest& req) const override {
        const std::uint64_t tag = fnv1a64(req.prompt) ^ (seed_ * 0x9e3779b97f4a7c15ull) ^
                                  static_cast<std::uint64_t>(req.kind);
        std::string reply;
        for (int i = 0; i < req.expected_blocks; ++i) {
            const std::string mark = to_hex(tag).substr(0, 8) + "-" + std::to_string(i + 1);
            reply += "<START>";
            switch (req.kind) {
            case OperatorKind::gradient_estimation:
                reply += "The prompt asks only for generally relevant passages and never "
                         "tells the model to prefer evidence that is valid at the query "
                         "timestamp, so older passages with heavy keyword overlap outrank "
                         "the up-to-date answer. (analysis " +
                         mark + ")";
                break;
            case OperatorKind::gradient_application:
                reply += "Given a web search query, retrieve relevant passages that answer "
                         "the query, giving priority to the most recent passage whose "
                         "content is current as of the query timestamp. (variant " +
                         mark + ")";
                break;
            case OperatorKind::crossover:
                reply += "Given a web search query, retrieve passages that answer the query "
                         "by weighing semantic relevance together with temporal validity, "
                         "preferring the latest information available at the query "
                         "timestamp. (hybrid " +
                         mark + ")";
                break;
            }
            reply += "<END>\n";
        }
        return reply;
    }

    std::string name() const override { return "mock"; }

private:
    std::uint64_t seed_;
};

} // namespace evorank
