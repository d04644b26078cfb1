#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "evorank/errors.hpp"
#include "evorank/types.hpp"

namespace evorank {

struct ScoredInstruction {
    Instruction instruction;
    ObjectiveVector objectives;

    friend bool operator==(const ScoredInstruction&, const ScoredInstruction&) = default;
};

// a dominates b: a is componentwise >= b and differs somewhere. Equal vectors
// never dominate each other.
inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    return a.ek >= b.ek && a.nek >= b.nek && (a.ek != b.ek || a.nek != b.nek);
}

// All and only non-dominated members of the pool, in input order. Exact
// duplicates (same text and same objectives) collapse to their first
// occurrence; distinct texts with identical objectives are all kept.
inline std::vector<ScoredInstruction> pareto_front(const std::vector<ScoredInstruction>& pool) {
    if (pool.empty()) {
        throw validation_error(validation_code::empty_pool, "pareto_front: empty pool");
    }
    std::vector<const ScoredInstruction*> unique;
    unique.reserve(pool.size());
    std::set<std::pair<std::string_view, std::pair<double, double>>> seen;
    for (const auto& s : pool) {
        if (seen.insert({s.instruction.text, {s.objectives.ek, s.objectives.nek}}).second) {
            unique.push_back(&s);
        }
    }
    std::vector<ScoredInstruction> front;
    for (const auto* a : unique) {
        bool dominated = false;
        for (const auto* b : unique) {
            if (a != b && dominates(b->objectives, a->objectives)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.push_back(*a);
    }
    return front;
}

// NSGA-II style crowding distance over a mutually non-dominated front.
// Per objective the members are sorted ascending (ties by instruction id for
// determinism); boundary members get +inf, interior members accumulate
// (next - prev) / (max - min). Degenerate objectives (max == min) contribute
// nothing to interior members.
inline std::map<std::string, double> crowding_distance(const std::vector<ScoredInstruction>& front) {
    std::map<std::string, double> dist;
    for (const auto& s : front) dist[s.instruction.id] = 0.0;
    if (front.size() <= 2) {
        for (auto& [id, d] : dist) d = std::numeric_limits<double>::infinity();
        return dist;
    }
    const auto accumulate = [&](auto key) {
        std::vector<const ScoredInstruction*> order;
        order.reserve(front.size());
        for (const auto& s : front) order.push_back(&s);
        std::sort(order.begin(), order.end(), [&](const auto* a, const auto* b) {
            const double va = key(*a);
            const double vb = key(*b);
            if (va != vb) return va < vb;
            return a->instruction.id < b->instruction.id;
        });
        dist[order.front()->instruction.id] = std::numeric_limits<double>::infinity();
        dist[order.back()->instruction.id] = std::numeric_limits<double>::infinity();
        const double span = key(*order.back()) - key(*order.front());
        if (span == 0.0) return;
        for (std::size_t i = 1; i + 1 < order.size(); ++i) {
            dist[order[i]->instruction.id] += (key(*order[i + 1]) - key(*order[i - 1])) / span;
        }
    };
    accumulate([](const ScoredInstruction& s) { return s.objectives.ek; });
    accumulate([](const ScoredInstruction& s) { return s.objectives.nek; });
    return dist;
}

namespace detail {

// Tie-break for pruning: higher EK, then higher NEK, then lexicographic id.
inline bool pruning_tie_break(const ScoredInstruction& a, const ScoredInstruction& b) {
    if (a.objectives.ek != b.objectives.ek) return a.objectives.ek > b.objectives.ek;
    if (a.objectives.nek != b.objectives.nek) return a.objectives.nek > b.objectives.nek;
    return a.instruction.id < b.instruction.id;
}

} // namespace detail

// Prunes an over-budget front to its B most spread-out members. With B >= 2
// the objective-wise extremes (best EK and best NEK) always survive. Output
// order is deterministic and permutation-invariant in the input.
inline std::vector<ScoredInstruction> select_top_by_crowding(
    const std::vector<ScoredInstruction>& front, int budget) {
    if (budget < 1) {
        throw validation_error(validation_code::invalid_config,
                               "select_top_by_crowding: budget must be >= 1");
    }
    const auto dist = crowding_distance(front);
    std::vector<ScoredInstruction> ordered = front;
    std::sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
        const double da = dist.at(a.instruction.id);
        const double db = dist.at(b.instruction.id);
        if (da != db) return da > db;
        return detail::pruning_tie_break(a, b);
    });
    if (ordered.size() <= static_cast<std::size_t>(budget)) return ordered;

    std::set<std::string> keep;
    if (budget >= 2) {
        const auto* best_ek = &ordered.front();
        const auto* best_nek = &ordered.front();
        for (const auto& s : ordered) {
            if (s.objectives.ek > best_ek->objectives.ek ||
                (s.objectives.ek == best_ek->objectives.ek &&
                 detail::pruning_tie_break(s, *best_ek))) {
                best_ek = &s;
            }
            if (s.objectives.nek > best_nek->objectives.nek ||
                (s.objectives.nek == best_nek->objectives.nek &&
                 detail::pruning_tie_break(s, *best_nek))) {
                best_nek = &s;
            }
        }
        keep.insert(best_ek->instruction.id);
        keep.insert(best_nek->instruction.id);
    }
    for (const auto& s : ordered) {
        if (keep.size() >= static_cast<std::size_t>(budget)) break;
        keep.insert(s.instruction.id);
    }
    std::vector<ScoredInstruction> selected;
    selected.reserve(keep.size());
    for (const auto& s : ordered) {
        if (keep.count(s.instruction.id)) selected.push_back(s);
    }
    return selected;
}

} // namespace evorank
