#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evorank/backend.hpp"
#include "evorank/errors.hpp"
#include "evorank/types.hpp"

namespace evorank {

// Binary relevance of each ranked position, best first.
inline std::vector<int> relevance_by_rank(const Ranking& ranking, const Instance& instance) {
    std::map<std::string_view, int> labels;
    for (const auto& c : instance.candidates) labels.emplace(c.id, c.label);
    std::vector<int> rels;
    rels.reserve(ranking.order.size());
    for (const auto& id : ranking.order) rels.push_back(labels.at(id));
    return rels;
}

namespace detail {

// 1-based rank of the first positive; 0 if there is none.
inline std::size_t first_positive_rank(const std::vector<int>& rels) {
    for (std::size_t i = 0; i < rels.size(); ++i) {
        if (rels[i] == 1) return i + 1;
    }
    return 0;
}

inline int count_positives(const std::vector<int>& rels) {
    int n = 0;
    for (int r : rels) n += r;
    return n;
}

} // namespace detail

// P@k: fraction of the top k that are positive. Requires 1 <= k <= pool size.
inline double precision_at_k(const std::vector<int>& rels, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > rels.size()) {
        throw validation_error(validation_code::cutoff_out_of_range,
                               "precision_at_k: k=" + std::to_string(k) + " outside pool of " +
                                   std::to_string(rels.size()));
    }
    int hits = 0;
    for (int i = 0; i < k; ++i) hits += rels[static_cast<std::size_t>(i)];
    return static_cast<double>(hits) / static_cast<double>(k);
}

inline double precision_at_k(const Ranking& ranking, const Instance& instance, int k) {
    return precision_at_k(relevance_by_rank(ranking, instance), k);
}

// AP = (1/|C+|) * sum over positive-held ranks of P@k; 0 if no positives.
inline double average_precision(const std::vector<int>& rels) {
    const int positives = detail::count_positives(rels);
    if (positives == 0) return 0.0;
    double sum = 0.0;
    int hits = 0;
    for (std::size_t i = 0; i < rels.size(); ++i) {
        if (rels[i] == 1) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(positives);
}

inline double average_precision(const Ranking& ranking, const Instance& instance) {
    return average_precision(relevance_by_rank(ranking, instance));
}

// RR@k: 1/r1 if the first positive sits at rank r1 <= k, else 0.
inline double reciprocal_rank_at_k(const std::vector<int>& rels, int k) {
    if (k < 1) {
        throw validation_error(validation_code::cutoff_out_of_range,
                               "reciprocal_rank_at_k: k must be >= 1");
    }
    const std::size_t r1 = detail::first_positive_rank(rels);
    if (r1 == 0 || r1 > static_cast<std::size_t>(k)) return 0.0;
    return 1.0 / static_cast<double>(r1);
}

inline double reciprocal_rank_at_k(const Ranking& ranking, const Instance& instance, int k) {
    return reciprocal_rank_at_k(relevance_by_rank(ranking, instance), k);
}

// nDCG@k with binary gains: DCG@k / IDCG@k, 0 when IDCG@k is 0.
inline double ndcg_at_k(const std::vector<int>& rels, int k) {
    if (k < 1) {
        throw validation_error(validation_code::cutoff_out_of_range, "ndcg_at_k: k must be >= 1");
    }
    const std::size_t depth = std::min<std::size_t>(rels.size(), static_cast<std::size_t>(k));
    double dcg = 0.0;
    for (std::size_t i = 0; i < depth; ++i) {
        if (rels[i] == 1) dcg += 1.0 / std::log2(static_cast<double>(i + 2));
    }
    const std::size_t ideal =
        std::min<std::size_t>(static_cast<std::size_t>(detail::count_positives(rels)), depth);
    double idcg = 0.0;
    for (std::size_t i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i + 2));
    if (idcg == 0.0) return 0.0;
    return dcg / idcg;
}

inline double ndcg_at_k(const Ranking& ranking, const Instance& instance, int k) {
    return ndcg_at_k(relevance_by_rank(ranking, instance), k);
}

// HitRate@k: 1 iff some positive appears within the top k.
inline double hit_rate_at_k(const std::vector<int>& rels, int k) {
    if (k < 1) {
        throw validation_error(validation_code::cutoff_out_of_range,
                               "hit_rate_at_k: k must be >= 1");
    }
    const std::size_t r1 = detail::first_positive_rank(rels);
    return (r1 != 0 && r1 <= static_cast<std::size_t>(k)) ? 1.0 : 0.0;
}

inline double hit_rate_at_k(const Ranking& ranking, const Instance& instance, int k) {
    return hit_rate_at_k(relevance_by_rank(ranking, instance), k);
}

// MAP over a query set; rankings[i] must belong to instances[i].
inline double mean_average_precision(const std::vector<Ranking>& rankings,
                                     const std::vector<Instance>& instances) {
    if (rankings.empty() || rankings.size() != instances.size()) {
        throw validation_error(validation_code::empty_query_set,
                               "mean_average_precision: need a non-empty aligned query set");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < rankings.size(); ++i) {
        sum += average_precision(rankings[i], instances[i]);
    }
    return sum / static_cast<double>(rankings.size());
}

// Pooled fraction of above-positive negatives that are tagged outdated,
// micro-averaged over all queries. Each instance must hold exactly one
// positive. Returns nullopt (the "no errors" signal) when no negative is
// ranked above a positive anywhere. In strict mode an untagged above-positive
// negative is an error; otherwise it counts in the denominator only.
inline std::optional<double> obsolete_ratio(const std::vector<Ranking>& rankings,
                                            const std::vector<Instance>& instances,
                                            bool strict = false) {
    if (rankings.size() != instances.size()) {
        throw validation_error(validation_code::empty_query_set,
                               "obsolete_ratio: rankings and instances must align");
    }
    long outdated = 0;
    long above = 0;
    for (std::size_t i = 0; i < rankings.size(); ++i) {
        const auto& inst = instances[i];
        std::map<std::string_view, const Candidate*> by_id;
        int positives = 0;
        for (const auto& c : inst.candidates) {
            by_id.emplace(c.id, &c);
            positives += c.label;
        }
        if (positives != 1) {
            throw validation_error(validation_code::not_single_positive,
                                   "obsolete_ratio: instance '" + inst.query.id +
                                       "' must have exactly one positive");
        }
        for (const auto& id : rankings[i].order) {
            const Candidate* c = by_id.at(id);
            if (c->label == 1) break; // everything below the positive is ignored
            ++above;
            if (c->negative_type == NegativeType::outdated) {
                ++outdated;
            } else if (c->negative_type == NegativeType::unspecified && strict) {
                throw validation_error(validation_code::unspecified_negative_type,
                                       "obsolete_ratio: candidate '" + c->id + "' of query '" +
                                           inst.query.id +
                                           "' is ranked above the positive but has no "
                                           "negative type");
            }
        }
    }
    if (above == 0) return std::nullopt;
    return static_cast<double>(outdated) / static_cast<double>(above);
}

struct MetricConfig {
    std::vector<int> cutoffs = {5, 10};
    bool with_obsolete_ratio = false;
    bool strict_negative_types = false;
};

struct MetricReport {
    std::map<std::string, double> values;
    std::vector<int> cutoffs;

    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

// Ranks every instance under one instruction and aggregates the configured
// metrics. The report's "map" entry is the utility the optimizer maximizes.
inline MetricReport evaluate(const Instruction& instruction,
                             const std::vector<Instance>& instances, const Backend& backend,
                             const MetricConfig& config = {}) {
    if (instances.empty()) {
        throw validation_error(validation_code::empty_query_set,
                               "evaluate: empty instance list");
    }
    std::vector<Ranking> rankings;
    rankings.reserve(instances.size());
    for (const auto& inst : instances) rankings.push_back(rank(backend, instruction, inst));

    MetricReport report;
    report.cutoffs = config.cutoffs;
    report.values["map"] = mean_average_precision(rankings, instances);
    const double n = static_cast<double>(instances.size());
    for (int k : config.cutoffs) {
        double mrr = 0.0;
        double ndcg = 0.0;
        double hit = 0.0;
        for (std::size_t i = 0; i < instances.size(); ++i) {
            const auto rels = relevance_by_rank(rankings[i], instances[i]);
            mrr += reciprocal_rank_at_k(rels, k);
            ndcg += ndcg_at_k(rels, k);
            hit += hit_rate_at_k(rels, k);
        }
        const std::string suffix = "@" + std::to_string(k);
        report.values["mrr" + suffix] = mrr / n;
        report.values["ndcg" + suffix] = ndcg / n;
        report.values["hit_rate" + suffix] = hit / n;
    }
    if (config.with_obsolete_ratio) {
        const auto ratio = obsolete_ratio(rankings, instances, config.strict_negative_types);
        if (ratio) report.values["obsolete_ratio"] = *ratio;
    }
    return report;
}

// Per-instance utility used to form the optimizer's objectives. Recognized
// names: "map" (per-query AP), "mrr@k", "ndcg@k", "hit_rate@k".
using UtilityFn = std::function<double(const Ranking&, const Instance&)>;

inline UtilityFn make_utility(const std::string& name) {
    if (name == "map") {
        return [](const Ranking& r, const Instance& i) { return average_precision(r, i); };
    }
    const auto at = name.find('@');
    if (at != std::string::npos) {
        const std::string base = name.substr(0, at);
        const int k = std::atoi(name.c_str() + at + 1);
        if (k >= 1) {
            if (base == "mrr") {
                return [k](const Ranking& r, const Instance& i) {
                    return reciprocal_rank_at_k(r, i, k);
                };
            }
            if (base == "ndcg") {
                return [k](const Ranking& r, const Instance& i) { return ndcg_at_k(r, i, k); };
            }
            if (base == "hit_rate") {
                return [k](const Ranking& r, const Instance& i) { return hit_rate_at_k(r, i, k); };
            }
        }
    }
    throw validation_error(validation_code::invalid_config, "unknown utility metric '" + name + "'");
}

} // namespace evorank
