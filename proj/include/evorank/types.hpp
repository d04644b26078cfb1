#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evorank/errors.hpp"
#include "evorank/timestamp.hpp"

namespace evorank {

// Prefix appended between a text and its timestamp. Part of the scoring
// input contract, so it must never change.
inline constexpr std::string_view timestamp_prefix = "\nTimestamp: ";

struct Query {
    std::string id;
    std::string text;
    Timestamp timestamp;

    friend bool operator==(const Query&, const Query&) = default;
};

enum class NegativeType {
    outdated,     // semantically rich but describes an earlier state
    insufficient, // temporally valid but not enough evidence to answer
    unspecified,  // untagged (typical for data without temporal annotation)
};

struct Candidate {
    std::string id;
    std::string text;
    Timestamp timestamp;
    int label = 0; // binary relevance
    NegativeType negative_type = NegativeType::unspecified;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

enum class Objective { ek, nek };

// One query with its candidate pool and labels; the unit of evaluation.
struct Instance {
    Query query;
    std::vector<Candidate> candidates;
    Objective source_objective = Objective::ek;

    friend bool operator==(const Instance&, const Instance&) = default;
};

struct ObjectiveVector {
    double ek = 0.0;
    double nek = 0.0;

    friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

enum class LineageKind { seed, mutation, crossover };

struct Lineage {
    LineageKind kind = LineageKind::seed;
    std::string parent_a;        // mutation parent or crossover parent A
    std::string parent_b;        // crossover parent B
    std::string gradient_digest; // digest of the gradient that drove a mutation

    static Lineage make_seed() { return {}; }
    static Lineage make_mutation(std::string parent_id, std::string digest) {
        Lineage l;
        l.kind = LineageKind::mutation;
        l.parent_a = std::move(parent_id);
        l.gradient_digest = std::move(digest);
        return l;
    }
    static Lineage make_crossover(std::string parent_a_id, std::string parent_b_id) {
        Lineage l;
        l.kind = LineageKind::crossover;
        l.parent_a = std::move(parent_a_id);
        l.parent_b = std::move(parent_b_id);
        return l;
    }

    friend bool operator==(const Lineage&, const Lineage&) = default;
};

// A natural-language instruction with identity, lineage and, once evaluated,
// its cached objective vector.
struct Instruction {
    std::string id;
    std::string text;
    Lineage lineage;
    std::optional<ObjectiveVector> objectives;

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

// A permutation of one candidate pool, best first. The order is always
// consistent with the scores under the tie-break rule: descending score,
// then ascending original candidate index.
struct Ranking {
    std::string instruction_id;
    std::string query_id;
    std::vector<std::string> order;
    std::map<std::string, double> scores;

    // 1-based position of a candidate; 0 if absent.
    std::size_t position_of(std::string_view candidate_id) const {
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (order[i] == candidate_id) return i + 1;
        }
        return 0;
    }

    friend bool operator==(const Ranking&, const Ranking&) = default;
};

// Appends "\nTimestamp: YYYY-MM-DDThh:mm:ssZ" to a text. Applied identically
// to query and candidate texts before backend scoring.
inline std::string render_with_timestamp(std::string_view text, Timestamp t) {
    std::string out;
    out.reserve(text.size() + timestamp_prefix.size() + 20);
    out.append(text);
    out.append(timestamp_prefix);
    out.append(t.to_string());
    return out;
}

// Inverse of render_with_timestamp: splits off a trailing timestamp suffix if
// present. For any text not containing the prefix, returns the input intact.
inline std::pair<std::string, std::optional<Timestamp>>
strip_timestamp_suffix(std::string_view rendered) {
    const std::size_t pos = rendered.rfind(timestamp_prefix);
    if (pos != std::string_view::npos &&
        rendered.size() == pos + timestamp_prefix.size() + 20) {
        const auto ts = Timestamp::try_parse(rendered.substr(pos + timestamp_prefix.size()));
        if (ts) return {std::string(rendered.substr(0, pos)), ts};
    }
    return {std::string(rendered), std::nullopt};
}

// Checks the Instance invariants: non-empty pool, distinct candidate ids,
// at least one positive. Returns its argument to allow inline use at load.
inline const Instance& validate_instance(const Instance& inst) {
    if (inst.candidates.empty()) {
        throw validation_error(validation_code::empty_pool,
                               "instance '" + inst.query.id + "' has an empty candidate pool");
    }
    std::set<std::string_view> seen;
    bool has_positive = false;
    for (const auto& c : inst.candidates) {
        if (!seen.insert(c.id).second) {
            throw validation_error(validation_code::duplicate_candidate_id,
                                   "instance '" + inst.query.id + "' has duplicate candidate id '" +
                                       c.id + "'");
        }
        if (c.label == 1) has_positive = true;
    }
    if (!has_positive) {
        throw validation_error(validation_code::no_positive,
                               "instance '" + inst.query.id + "' has no positive candidate");
    }
    return inst;
}

inline std::string_view to_string(Objective o) { return o == Objective::ek ? "EK" : "NEK"; }

inline std::string_view to_string(NegativeType t) {
    switch (t) {
    case NegativeType::outdated: return "outdated";
    case NegativeType::insufficient: return "insufficient";
    default: return "unspecified";
    }
}

} // namespace evorank
