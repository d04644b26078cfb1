#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "evorank/types.hpp"

namespace evorank {

// One pointwise scoring request. Query and candidate texts arrive
// timestamp-rendered; the ids are carried for caching and error reporting.
struct ScoreRequest {
    std::string instruction;
    std::string query_text;
    std::string candidate_text;
    std::string query_id;
    std::string candidate_id;
};

// The scoring contract: an (instruction, query, candidate) triple maps to a
// relevance score in [0, 1]. Implementations must be deterministic for a
// fixed request and safe to call from multiple threads.
class Backend {
public:
    virtual ~Backend() = default;
    virtual double score(const ScoreRequest& req) const = 0;
    virtual std::string name() const = 0;
};

// Scores every candidate of an instance under an instruction and orders them
// by descending score, ties broken by ascending original candidate index.
// Positions in the resulting permutation are 1-based.
inline Ranking rank(const Backend& backend, const Instruction& instruction,
                    const Instance& instance) {
    const std::string query_rendered =
        render_with_timestamp(instance.query.text, instance.query.timestamp);

    std::vector<double> scores(instance.candidates.size());
    for (std::size_t i = 0; i < instance.candidates.size(); ++i) {
        const auto& c = instance.candidates[i];
        ScoreRequest req;
        req.instruction = instruction.text;
        req.query_text = query_rendered;
        req.candidate_text = render_with_timestamp(c.text, c.timestamp);
        req.query_id = instance.query.id;
        req.candidate_id = c.id;
        scores[i] = backend.score(req);
    }

    std::vector<std::size_t> idx(instance.candidates.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    Ranking ranking;
    ranking.instruction_id = instruction.id;
    ranking.query_id = instance.query.id;
    ranking.order.reserve(idx.size());
    for (std::size_t i : idx) {
        ranking.order.push_back(instance.candidates[i].id);
        ranking.scores.emplace(instance.candidates[i].id, scores[i]);
    }
    return ranking;
}

} // namespace evorank
