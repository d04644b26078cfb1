#pragma once

#include <algorithm>
#include <memory>
#include <string>

#include "evorank/backend.hpp"
#include "evorank/types.hpp"

namespace evorank {

// Temporal score fusion: semantic score plus lambda / (1 + |dt| in days),
// clamped to [0, 1]. The hyperbolic form is bounded and has no singularity
// at dt = 0. With lambda = 0 the semantic score passes through unchanged.
inline double tempralm_score(double inner_semantic_score, double lambda, Timestamp query_ts,
                             Timestamp candidate_ts) {
    const double r = lambda / (1.0 + days_between(query_ts, candidate_ts));
    return std::clamp(inner_semantic_score + r, 0.0, 1.0);
}

// Wraps any backend and adds the temporal score on top of its output. The
// timestamps are recovered from the rendered request texts; requests without
// timestamps pass through untouched.
class TempRalmBackend : public Backend {
public:
    TempRalmBackend(std::shared_ptr<const Backend> inner, double lambda)
        : inner_(std::move(inner)), lambda_(lambda) {}

    double score(const ScoreRequest& req) const override {
        const double s = inner_->score(req);
        const auto [q_text, q_ts] = strip_timestamp_suffix(req.query_text);
        const auto [c_text, c_ts] = strip_timestamp_suffix(req.candidate_text);
        (void)q_text;
        (void)c_text;
        if (!q_ts || !c_ts) return std::clamp(s, 0.0, 1.0);
        return tempralm_score(s, lambda_, *q_ts, *c_ts);
    }

    std::string name() const override { return "tempralm(" + inner_->name() + ")"; }

private:
    std::shared_ptr<const Backend> inner_;
    double lambda_;
};

} // namespace evorank
