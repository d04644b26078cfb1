#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "evorank/backend.hpp"
#include "evorank/types.hpp"

namespace evorank {

// Deterministic desk-scale backend: a fixed lexical-overlap score plus a
// recency bonus that is only active when the instruction mentions one of the
// trigger tokens. This mirrors an instruction-conditioned re-ranker closely
// enough to drive the optimizer end-to-end without any model.
struct ScriptedConfig {
    double temporal_weight = 0.3;
    double horizon_days = 365.0;
    std::vector<std::string> trigger_tokens = {"recent", "up-to-date", "latest", "current"};
};

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::set<std::string> token_set(std::string_view text) {
    std::set<std::string> tokens;
    std::string current;
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!current.empty()) tokens.insert(lower(current));
            current.clear();
        } else {
            current += ch;
        }
    }
    if (!current.empty()) tokens.insert(lower(current));
    return tokens;
}

} // namespace detail

// |tokens(query) intersect tokens(candidate)| / |tokens(query)|, lower-cased
// whitespace tokens. Empty query token set yields 0.
inline double lexical_overlap(std::string_view query_text, std::string_view candidate_text) {
    const auto q = detail::token_set(query_text);
    if (q.empty()) return 0.0;
    const auto c = detail::token_set(candidate_text);
    std::size_t hits = 0;
    for (const auto& t : q) hits += c.count(t);
    return static_cast<double>(hits) / static_cast<double>(q.size());
}

inline bool has_trigger_token(const ScriptedConfig& config, std::string_view instruction) {
    const std::string lowered = detail::lower(instruction);
    for (const auto& t : config.trigger_tokens) {
        if (lowered.find(detail::lower(t)) != std::string::npos) return true;
    }
    return false;
}

// 0.7 * lexical_overlap + w * recency, clamped to [0, 1], where
// recency = max(0, 1 - |dt| / horizon) and w is the temporal weight if the
// instruction contains a trigger token, else 0.
inline double scripted_score(const ScriptedConfig& config, std::string_view instruction,
                             const Query& query, const Candidate& candidate) {
    double score = 0.7 * lexical_overlap(query.text, candidate.text);
    if (has_trigger_token(config, instruction)) {
        const double dt = days_between(query.timestamp, candidate.timestamp);
        const double recency = std::max(0.0, 1.0 - dt / config.horizon_days);
        score += config.temporal_weight * recency;
    }
    return std::clamp(score, 0.0, 1.0);
}

class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(ScriptedConfig config = {}) : config_(std::move(config)) {}

    double score(const ScoreRequest& req) const override {
        const auto [query_text, query_ts] = strip_timestamp_suffix(req.query_text);
        const auto [candidate_text, candidate_ts] = strip_timestamp_suffix(req.candidate_text);
        Query q;
        q.id = req.query_id;
        q.text = query_text;
        Candidate c;
        c.id = req.candidate_id;
        c.text = candidate_text;
        if (query_ts && candidate_ts) {
            q.timestamp = *query_ts;
            c.timestamp = *candidate_ts;
            return scripted_score(config_, req.instruction, q, c);
        }
        // No timestamps in the request: the recency term has nothing to act
        // on, so only the semantic part contributes.
        return std::clamp(0.7 * lexical_overlap(q.text, c.text), 0.0, 1.0);
    }

    std::string name() const override { return "scripted"; }

    const ScriptedConfig& config() const { return config_; }

private:
    ScriptedConfig config_;
};

} // namespace evorank
