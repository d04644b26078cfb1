#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "evorank/errors.hpp"
#include "evorank/optimizer.hpp"
#include "evorank/types.hpp"

namespace evorank {

// JSONL record schema, one instance per line:
//   {"query_id", "query_text", "query_timestamp", "objective": "EK"|"NEK",
//    "candidates": [{"id", "text", "timestamp", "label", "negative_type"?}]}
// negative_type is optional and defaults to "unspecified"; strict loading
// requires it on every negative.

inline NegativeType negative_type_from_string(const std::string& s) {
    if (s == "outdated") return NegativeType::outdated;
    if (s == "insufficient") return NegativeType::insufficient;
    if (s == "unspecified") return NegativeType::unspecified;
    throw parse_error("unknown negative_type '" + s + "'");
}

inline Instance instance_from_json(const nlohmann::json& j, bool strict = false) {
    Instance inst;
    inst.query.id = j.at("query_id").get<std::string>();
    inst.query.text = j.at("query_text").get<std::string>();
    inst.query.timestamp = Timestamp::parse(j.at("query_timestamp").get<std::string>());
    const auto objective = j.at("objective").get<std::string>();
    if (objective == "EK") {
        inst.source_objective = Objective::ek;
    } else if (objective == "NEK") {
        inst.source_objective = Objective::nek;
    } else {
        throw parse_error("objective must be \"EK\" or \"NEK\", got '" + objective + "'");
    }
    for (const auto& cj : j.at("candidates")) {
        Candidate c;
        c.id = cj.at("id").get<std::string>();
        c.text = cj.at("text").get<std::string>();
        c.timestamp = Timestamp::parse(cj.at("timestamp").get<std::string>());
        c.label = cj.at("label").get<int>();
        if (c.label != 0 && c.label != 1) {
            throw parse_error("candidate '" + c.id + "' has non-binary label");
        }
        if (cj.contains("negative_type")) {
            c.negative_type = negative_type_from_string(cj.at("negative_type").get<std::string>());
        }
        if (strict && c.label == 0 && c.negative_type == NegativeType::unspecified) {
            throw validation_error(validation_code::unspecified_negative_type,
                                   "strict mode: negative '" + c.id + "' of query '" +
                                       inst.query.id + "' lacks a negative_type");
        }
        inst.candidates.push_back(std::move(c));
    }
    validate_instance(inst);
    return inst;
}

inline nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json candidates = nlohmann::json::array();
    for (const auto& c : inst.candidates) {
        nlohmann::json cj = {{"id", c.id},
                             {"text", c.text},
                             {"timestamp", c.timestamp.to_string()},
                             {"label", c.label}};
        if (c.negative_type != NegativeType::unspecified) {
            cj["negative_type"] = std::string(to_string(c.negative_type));
        }
        candidates.push_back(std::move(cj));
    }
    return nlohmann::json{{"query_id", inst.query.id},
                          {"query_text", inst.query.text},
                          {"query_timestamp", inst.query.timestamp.to_string()},
                          {"objective", std::string(to_string(inst.source_objective))},
                          {"candidates", std::move(candidates)}};
}

// Parses and validates a JSONL dataset. Every instance must satisfy the
// Instance invariants and query ids must be unique file-wide.
inline std::vector<Instance> load_instances(const std::filesystem::path& path,
                                            bool strict = false) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open dataset file " + path.string());

    std::vector<Instance> instances;
    std::set<std::string> query_ids;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(std::string("invalid JSON (") + e.what() + ")", line_no);
        }
        Instance inst;
        try {
            inst = instance_from_json(j, strict);
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(std::string("bad record (") + e.what() + ")", line_no);
        } catch (const parse_error& e) {
            throw parse_error(e.what(), line_no);
        }
        if (!query_ids.insert(inst.query.id).second) {
            throw validation_error(validation_code::duplicate_candidate_id,
                                   "duplicate query id '" + inst.query.id + "' at line " +
                                       std::to_string(line_no));
        }
        instances.push_back(std::move(inst));
    }
    return instances;
}

inline void save_instances(const std::vector<Instance>& instances,
                           const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open dataset file " + path.string() + " for writing");
    for (const auto& inst : instances) {
        out << instance_to_json(inst).dump() << '\n';
    }
    if (!out) throw io_error("failed writing dataset " + path.string());
}

inline const Timestamp default_nek_range_lo = Timestamp::from_civil(2018, 1, 1);
inline const Timestamp default_nek_range_hi = Timestamp::from_civil(2025, 1, 1);

// Assigns every query and candidate an independent uniform-random timestamp
// in [lo, hi), deterministically from the seed. Texts and labels are left
// untouched.
inline std::vector<Instance> synthesize_nek_timestamps(std::vector<Instance> instances,
                                                       std::uint64_t seed,
                                                       Timestamp lo = default_nek_range_lo,
                                                       Timestamp hi = default_nek_range_hi) {
    if (hi.seconds() <= lo.seconds()) {
        throw validation_error(validation_code::invalid_config,
                               "timestamp range must satisfy lo < hi");
    }
    std::mt19937_64 rng(seed);
    const std::uint64_t span = static_cast<std::uint64_t>(hi.seconds() - lo.seconds());
    const auto draw = [&]() { return Timestamp(lo.seconds() + static_cast<std::int64_t>(rng() % span)); };
    for (auto& inst : instances) {
        inst.query.timestamp = draw();
        for (auto& c : inst.candidates) c.timestamp = draw();
    }
    return instances;
}

namespace detail {

inline std::string zero_padded(std::uint64_t n, const char* prefix) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%04llu", prefix, static_cast<unsigned long long>(n));
    return buf;
}

} // namespace detail

// Desk-scale EK fixtures. Each instance pairs one recent positive with one
// outdated hard negative whose lexical overlap with the query is strictly
// higher, plus at least three temporally valid but insufficient negatives
// dated like the positive. The overlaps are fixed at 0.6 (positive), 0.8
// (outdated) and 0.4 (insufficient), so under the default scripted backend
// an instruction without a trigger token ranks the outdated negative first
// (0.56 vs 0.42) while any instruction with a trigger token puts the
// positive on top (0.72 vs 0.58 / 0.56).
inline std::vector<Instance> generate_synthetic_ek(int n_queries, std::uint64_t seed) {
    if (n_queries < 1) {
        throw validation_error(validation_code::invalid_config,
                               "generate_synthetic_ek: n_queries must be >= 1");
    }
    std::mt19937_64 rng(seed);
    const std::int64_t day = 86400;
    const Timestamp query_lo = Timestamp::from_civil(2023, 1, 1);
    const std::int64_t query_span_days = 730;

    std::vector<Instance> instances;
    instances.reserve(static_cast<std::size_t>(n_queries));
    for (int qi = 0; qi < n_queries; ++qi) {
        const std::string qid = detail::zero_padded(static_cast<std::uint64_t>(qi), "ek-");
        const std::string tag = std::to_string(qi);
        const Timestamp query_ts(query_lo.seconds() +
                                 static_cast<std::int64_t>(rng() % query_span_days) * day +
                                 static_cast<std::int64_t>(rng() % day));
        const Timestamp outdated_ts(query_ts.seconds() -
                                    (400 + static_cast<std::int64_t>(rng() % 401)) * day);

        Instance inst;
        inst.source_objective = Objective::ek;
        inst.query.id = qid;
        inst.query.text = "team" + tag + " coach" + tag + " role" + tag + " season" + tag +
                          " update" + tag;
        inst.query.timestamp = query_ts;

        std::vector<Candidate> pool;
        Candidate positive;
        positive.id = qid + "-pos";
        positive.text = "team" + tag + " coach" + tag + " role" + tag + " name" + tag +
                        "new fresh" + tag;
        positive.timestamp = query_ts;
        positive.label = 1;
        pool.push_back(std::move(positive));

        Candidate outdated;
        outdated.id = qid + "-out";
        outdated.text = "team" + tag + " coach" + tag + " role" + tag + " season" + tag +
                        " name" + tag + "old";
        outdated.timestamp = outdated_ts;
        outdated.label = 0;
        outdated.negative_type = NegativeType::outdated;
        pool.push_back(std::move(outdated));

        const int insufficient = 3 + static_cast<int>(rng() % 2);
        for (int j = 0; j < insufficient; ++j) {
            Candidate c;
            c.id = qid + "-ins" + std::to_string(j + 1);
            const std::string jt = tag + "x" + std::to_string(j + 1);
            c.text = "team" + tag + " season" + tag + " venue" + jt + " note" + jt;
            c.timestamp = query_ts; // same date as the positive
            c.label = 0;
            c.negative_type = NegativeType::insufficient;
            pool.push_back(std::move(c));
        }

        // Seeded shuffle so the positive is not always at the same index.
        for (std::size_t i = pool.size(); i > 1; --i) {
            std::swap(pool[i - 1], pool[rng() % i]);
        }
        inst.candidates = std::move(pool);
        validate_instance(inst);
        instances.push_back(std::move(inst));
    }
    return instances;
}

// NEK fixtures: the positive contains every query token (overlap 1.0) while
// negatives stay at overlap <= 0.4, leaving a margin larger than the maximal
// recency bonus. Rankings are therefore identical under any instruction and
// any timestamps, which is the desired recency-insensitive behaviour.
// Timestamps are placeholders; pass the result through
// synthesize_nek_timestamps for randomized ones. Negatives carry no
// negative_type, like typical non-temporal ranking data.
inline std::vector<Instance> generate_synthetic_nek(int n_queries, std::uint64_t seed) {
    if (n_queries < 1) {
        throw validation_error(validation_code::invalid_config,
                               "generate_synthetic_nek: n_queries must be >= 1");
    }
    std::mt19937_64 rng(seed);
    const Timestamp placeholder = Timestamp::from_civil(2020, 6, 15);

    std::vector<Instance> instances;
    instances.reserve(static_cast<std::size_t>(n_queries));
    for (int qi = 0; qi < n_queries; ++qi) {
        const std::string qid = detail::zero_padded(static_cast<std::uint64_t>(qi), "nek-");
        const std::string tag = std::to_string(qi);

        Instance inst;
        inst.source_objective = Objective::nek;
        inst.query.id = qid;
        inst.query.text = "topic" + tag + " alpha" + tag + " beta" + tag + " gamma" + tag +
                          " delta" + tag;
        inst.query.timestamp = placeholder;

        Candidate positive;
        positive.id = qid + "-pos";
        positive.text = inst.query.text + " answer" + tag;
        positive.timestamp = placeholder;
        positive.label = 1;
        inst.candidates.push_back(std::move(positive));

        for (int j = 0; j < 4; ++j) {
            Candidate c;
            c.id = qid + "-neg" + std::to_string(j + 1);
            const std::string jt = tag + "n" + std::to_string(j + 1);
            if (j < 2) {
                c.text = "topic" + tag + " filler" + jt + " noise" + jt + " pad" + jt;
            } else {
                c.text = "topic" + tag + " alpha" + tag + " blur" + jt + " haze" + jt;
            }
            c.timestamp = placeholder;
            c.label = 0;
            inst.candidates.push_back(std::move(c));
        }

        for (std::size_t i = inst.candidates.size(); i > 1; --i) {
            std::swap(inst.candidates[i - 1], inst.candidates[rng() % i]);
        }
        validate_instance(inst);
        instances.push_back(std::move(inst));
    }
    return instances;
}

// Prefix split into train/validation. The fraction applies to train and is
// floored, but both sides keep at least one instance.
inline Dataset split_dataset(std::vector<Instance> instances, double train_fraction = 0.2) {
    if (instances.size() < 2) {
        throw validation_error(validation_code::invalid_config,
                               "split_dataset: need at least 2 instances");
    }
    if (train_fraction <= 0.0 || train_fraction >= 1.0) {
        throw validation_error(validation_code::invalid_config,
                               "split_dataset: train fraction must lie in (0, 1)");
    }
    std::size_t n_train =
        static_cast<std::size_t>(train_fraction * static_cast<double>(instances.size()));
    n_train = std::max<std::size_t>(1, std::min(n_train, instances.size() - 1));
    Dataset out;
    out.train.assign(instances.begin(), instances.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.validation.assign(instances.begin() + static_cast<std::ptrdiff_t>(n_train),
                          instances.end());
    return out;
}

} // namespace evorank
