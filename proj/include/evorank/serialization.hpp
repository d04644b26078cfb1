#pragma once

#include <json.hpp>

#include "evorank/metrics.hpp"
#include "evorank/optimizer.hpp"
#include "evorank/pareto.hpp"
#include "evorank/types.hpp"

// JSON bindings for the domain types. nlohmann::json keeps object keys
// sorted, so every dump of the same value is byte-identical; checkpoint
// digests and replay tests rely on that.

namespace evorank {

inline void to_json(nlohmann::json& j, const Timestamp& t) { j = t.to_string(); }
inline void from_json(const nlohmann::json& j, Timestamp& t) {
    t = Timestamp::parse(j.get<std::string>());
}

inline void to_json(nlohmann::json& j, const ObjectiveVector& v) {
    j = nlohmann::json{{"ek", v.ek}, {"nek", v.nek}};
}
inline void from_json(const nlohmann::json& j, ObjectiveVector& v) {
    j.at("ek").get_to(v.ek);
    j.at("nek").get_to(v.nek);
}

inline void to_json(nlohmann::json& j, const Lineage& l) {
    switch (l.kind) {
    case LineageKind::seed:
        j = nlohmann::json{{"kind", "seed"}};
        break;
    case LineageKind::mutation:
        j = nlohmann::json{{"kind", "mutation"},
                           {"parent", l.parent_a},
                           {"gradient_digest", l.gradient_digest}};
        break;
    case LineageKind::crossover:
        j = nlohmann::json{{"kind", "crossover"},
                           {"parent_a", l.parent_a},
                           {"parent_b", l.parent_b}};
        break;
    }
}
inline void from_json(const nlohmann::json& j, Lineage& l) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "seed") {
        l = Lineage::make_seed();
    } else if (kind == "mutation") {
        l = Lineage::make_mutation(j.at("parent").get<std::string>(),
                                   j.at("gradient_digest").get<std::string>());
    } else if (kind == "crossover") {
        l = Lineage::make_crossover(j.at("parent_a").get<std::string>(),
                                    j.at("parent_b").get<std::string>());
    } else {
        throw parse_error("unknown lineage kind '" + kind + "'");
    }
}

inline void to_json(nlohmann::json& j, const Instruction& p) {
    j = nlohmann::json{{"id", p.id}, {"text", p.text}, {"lineage", p.lineage}};
    if (p.objectives) j["objectives"] = *p.objectives;
}
inline void from_json(const nlohmann::json& j, Instruction& p) {
    j.at("id").get_to(p.id);
    j.at("text").get_to(p.text);
    j.at("lineage").get_to(p.lineage);
    if (j.contains("objectives")) {
        p.objectives = j.at("objectives").get<ObjectiveVector>();
    } else {
        p.objectives.reset();
    }
}

inline void to_json(nlohmann::json& j, const ScoredInstruction& s) {
    j = nlohmann::json{{"instruction", s.instruction}, {"objectives", s.objectives}};
}
inline void from_json(const nlohmann::json& j, ScoredInstruction& s) {
    j.at("instruction").get_to(s.instruction);
    j.at("objectives").get_to(s.objectives);
}

inline void to_json(nlohmann::json& j, const RoundRecord& r) {
    j = nlohmann::json{{"round", r.round}, {"candidates", r.candidates}, {"selected", r.selected}};
}
inline void from_json(const nlohmann::json& j, RoundRecord& r) {
    j.at("round").get_to(r.round);
    j.at("candidates").get_to(r.candidates);
    j.at("selected").get_to(r.selected);
}

inline void to_json(nlohmann::json& j, const ExampleLimits& e) {
    j = nlohmann::json{{"max_examples", e.max_examples},
                       {"max_offenders", e.max_offenders},
                       {"passage_chars", e.passage_chars}};
}
inline void from_json(const nlohmann::json& j, ExampleLimits& e) {
    j.at("max_examples").get_to(e.max_examples);
    j.at("max_offenders").get_to(e.max_offenders);
    j.at("passage_chars").get_to(e.passage_chars);
}

inline void to_json(nlohmann::json& j, const OptimizerConfig& c) {
    j = nlohmann::json{{"rounds", c.rounds},
                       {"pareto_budget", c.pareto_budget},
                       {"expansion_factor", c.expansion_factor},
                       {"train_batch_ek", c.train_batch_ek},
                       {"train_batch_nek", c.train_batch_nek},
                       {"val_batch_ek", c.val_batch_ek},
                       {"val_batch_nek", c.val_batch_nek},
                       {"seed", c.seed},
                       {"utility", c.utility},
                       {"num_gradients", c.num_gradients},
                       {"steps_per_gradient", c.steps_per_gradient},
                       {"example_limits", c.example_limits},
                       {"initial_instruction", c.initial_instruction},
                       {"resample_validation_each_round", c.resample_validation_each_round}};
}
inline void from_json(const nlohmann::json& j, OptimizerConfig& c) {
    j.at("rounds").get_to(c.rounds);
    j.at("pareto_budget").get_to(c.pareto_budget);
    j.at("expansion_factor").get_to(c.expansion_factor);
    j.at("train_batch_ek").get_to(c.train_batch_ek);
    j.at("train_batch_nek").get_to(c.train_batch_nek);
    j.at("val_batch_ek").get_to(c.val_batch_ek);
    j.at("val_batch_nek").get_to(c.val_batch_nek);
    j.at("seed").get_to(c.seed);
    j.at("utility").get_to(c.utility);
    j.at("num_gradients").get_to(c.num_gradients);
    j.at("steps_per_gradient").get_to(c.steps_per_gradient);
    j.at("example_limits").get_to(c.example_limits);
    j.at("initial_instruction").get_to(c.initial_instruction);
    j.at("resample_validation_each_round").get_to(c.resample_validation_each_round);
}

inline void to_json(nlohmann::json& j, const RunState& s) {
    j = nlohmann::json{{"round", s.round},         {"population", s.population},
                       {"rng_state", s.rng_state}, {"score_cache", s.score_cache},
                       {"history", s.history},     {"next_id", s.next_id},
                       {"config", s.config}};
}
inline void from_json(const nlohmann::json& j, RunState& s) {
    j.at("round").get_to(s.round);
    j.at("population").get_to(s.population);
    j.at("rng_state").get_to(s.rng_state);
    j.at("score_cache").get_to(s.score_cache);
    j.at("history").get_to(s.history);
    j.at("next_id").get_to(s.next_id);
    j.at("config").get_to(s.config);
}

inline void to_json(nlohmann::json& j, const MetricReport& r) {
    j = nlohmann::json{{"values", r.values}, {"cutoffs", r.cutoffs}};
}
inline void from_json(const nlohmann::json& j, MetricReport& r) {
    j.at("values").get_to(r.values);
    j.at("cutoffs").get_to(r.cutoffs);
}

// Canonical state equality: two states are the same iff they serialize to
// the same JSON document.
inline bool states_equal(const RunState& a, const RunState& b) {
    return nlohmann::json(a) == nlohmann::json(b);
}

} // namespace evorank
