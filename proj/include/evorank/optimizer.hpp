#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "evorank/errors.hpp"
#include "evorank/metrics.hpp"
#include "evorank/operators.hpp"
#include "evorank/pareto.hpp"
#include "evorank/score_cache.hpp"
#include "evorank/types.hpp"

namespace evorank {

inline constexpr std::string_view default_initial_instruction =
    "Given a web search query, retrieve relevant passages that answer the query";

struct OptimizerConfig {
    int rounds = 10;
    int pareto_budget = 4;
    int expansion_factor = 8; // per-parent offspring budget, split between operators
    int train_batch_ek = 32;
    int train_batch_nek = 32;
    int val_batch_ek = 0;  // 0 = full validation split
    int val_batch_nek = 0; // 0 = full validation split
    std::uint64_t seed = 0;
    std::string utility = "map";
    int num_gradients = 2;
    int steps_per_gradient = 2;
    ExampleLimits example_limits;
    std::string initial_instruction{default_initial_instruction};
    bool resample_validation_each_round = true;

    void validate() const {
        if (rounds < 1) {
            throw validation_error(validation_code::invalid_config, "rounds must be >= 1");
        }
        if (pareto_budget < 1) {
            throw validation_error(validation_code::invalid_config, "pareto budget must be >= 1");
        }
        if (expansion_factor < 2) {
            throw validation_error(validation_code::invalid_config,
                                   "expansion factor must be >= 2 (split between two operators)");
        }
        if (train_batch_ek < 1 || train_batch_nek < 1) {
            throw validation_error(validation_code::invalid_config,
                                   "train batch sizes must be >= 1");
        }
        if (val_batch_ek < 0 || val_batch_nek < 0) {
            throw validation_error(validation_code::invalid_config,
                                   "validation batch sizes must be >= 0 (0 = full split)");
        }
        if (num_gradients < 1 || steps_per_gradient < 1) {
            throw validation_error(validation_code::invalid_config,
                                   "num_gradients and steps_per_gradient must be >= 1");
        }
        if (initial_instruction.empty()) {
            throw validation_error(validation_code::invalid_config,
                                   "initial instruction must be non-empty");
        }
        make_utility(utility); // throws on unknown metric names
    }

    friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

inline bool operator==(const ExampleLimits& a, const ExampleLimits& b) {
    return a.max_examples == b.max_examples && a.max_offenders == b.max_offenders &&
           a.passage_chars == b.passage_chars;
}

// A task split. Train drives the operators, validation drives the objective
// estimates; the pools must not share queries.
struct Dataset {
    std::vector<Instance> train;
    std::vector<Instance> validation;
};

// Everything evaluated in one round: the combined candidate pool with its
// objective vectors plus the ids that survived selection.
struct RoundRecord {
    int round = 0;
    std::vector<ScoredInstruction> candidates;
    std::vector<std::string> selected;
};

// The checkpointable optimizer state. A round maps one RunState to the next;
// nothing lives outside it, which is what makes interrupted runs resumable
// bit-for-bit.
struct RunState {
    int round = 0;
    std::vector<Instruction> population;
    std::string rng_state;
    std::map<std::string, double> score_cache;
    std::vector<RoundRecord> history;
    std::uint64_t next_id = 0;
    OptimizerConfig config;
};

namespace detail {

inline std::string serialize_rng(const std::mt19937_64& rng) {
    std::ostringstream oss;
    oss << rng;
    return oss.str();
}

inline std::mt19937_64 deserialize_rng(const std::string& text) {
    std::mt19937_64 rng;
    std::istringstream iss(text);
    iss >> rng;
    if (!iss) {
        throw corrupt_checkpoint_error("cannot restore RNG state");
    }
    return rng;
}

// Deterministic draw of k items without replacement (partial Fisher-Yates
// with explicit modulo; std::shuffle is not portable across libraries).
inline std::vector<Instance> sample_batch(const std::vector<Instance>& pool, int requested,
                                          std::mt19937_64& rng) {
    const std::size_t k = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(requested));
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
        std::swap(idx[i], idx[j]);
    }
    std::vector<Instance> batch;
    batch.reserve(k);
    for (std::size_t i = 0; i < k; ++i) batch.push_back(pool[idx[i]]);
    return batch;
}

inline std::vector<std::size_t> indices_sorted_by_id(const std::vector<Instruction>& pop) {
    std::vector<std::size_t> idx(pop.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return pop[a].id < pop[b].id; });
    return idx;
}

inline double mean_utility(const Instruction& instruction, const std::vector<Instance>& batch,
                           const Backend& backend, const UtilityFn& utility) {
    double sum = 0.0;
    for (const auto& inst : batch) {
        sum += utility(rank(backend, instruction, inst), inst);
    }
    return sum / static_cast<double>(batch.size());
}

} // namespace detail

// Estimates the objective vector of every instruction in the pool: the mean
// per-instance utility over the EK and NEK validation batches. All
// instructions see the same batches, so the vectors are comparable.
inline std::vector<ScoredInstruction> evaluate_population(const std::vector<Instruction>& pool,
                                                          const std::vector<Instance>& val_ek,
                                                          const std::vector<Instance>& val_nek,
                                                          const Backend& backend,
                                                          const UtilityFn& utility) {
    if (val_ek.empty() || val_nek.empty()) {
        throw validation_error(validation_code::empty_query_set,
                               "evaluate_population: validation batches must be non-empty");
    }
    std::vector<ScoredInstruction> scored;
    scored.reserve(pool.size());
    for (const auto& instruction : pool) {
        ObjectiveVector objectives;
        objectives.ek = detail::mean_utility(instruction, val_ek, backend, utility);
        objectives.nek = detail::mean_utility(instruction, val_nek, backend, utility);
        ScoredInstruction s;
        s.instruction = instruction;
        s.instruction.objectives = objectives;
        s.objectives = objectives;
        scored.push_back(std::move(s));
    }
    return scored;
}

// One Expansion / Evaluation / Selection round. The input state is left
// untouched; on backend or operator transport failure the round aborts by
// exception and can simply be re-run.
inline RunState run_round(const RunState& state, const Dataset& ek_data, const Dataset& nek_data,
                          const Backend& backend, const OperatorLlm& op_llm,
                          const Templates& templates = {}) {
    const OptimizerConfig& config = state.config;
    const UtilityFn utility = make_utility(config.utility);

    std::mt19937_64 rng = detail::deserialize_rng(state.rng_state);
    IdAllocator ids{state.next_id};

    CachedBackend cached(std::shared_ptr<const Backend>(&backend, [](const Backend*) {}));
    cached.restore(state.score_cache);

    // --- Expansion ---------------------------------------------------------
    const auto train_ek = detail::sample_batch(ek_data.train, config.train_batch_ek, rng);
    const auto train_nek = detail::sample_batch(nek_data.train, config.train_batch_nek, rng);
    std::vector<Instance> train_all = train_ek;
    train_all.insert(train_all.end(), train_nek.begin(), train_nek.end());

    const auto parent_order = detail::indices_sorted_by_id(state.population);
    const int mutation_budget = (config.expansion_factor + 1) / 2; // per parent
    const int crossover_budget =
        (config.expansion_factor / 2) * static_cast<int>(state.population.size());

    std::vector<Instruction> offspring;

    // Mutation: textual-gradient estimate + apply per parent with errors.
    for (std::size_t pi : parent_order) {
        const Instruction& parent = state.population[pi];
        const auto errors = compute_error_set(parent, train_all, cached);
        if (errors.empty()) continue;
        std::vector<TextualGradient> gradients;
        try {
            gradients = estimate_gradients(op_llm, templates, parent, errors,
                                           config.num_gradients, config.example_limits);
        } catch (const operator_error& e) {
            if (e.code() != operator_code::no_parsable_output) throw;
            continue; // slot forfeited, budget shortfall tolerated
        }
        int produced = 0;
        for (const auto& gradient : gradients) {
            if (produced >= mutation_budget) break;
            std::vector<Instruction> kids;
            try {
                kids = apply_gradient(op_llm, templates, parent, errors, gradient,
                                      config.steps_per_gradient, ids, config.example_limits);
            } catch (const operator_error& e) {
                if (e.code() != operator_code::no_parsable_output) throw;
                continue;
            }
            for (auto& kid : kids) {
                if (produced >= mutation_budget) break;
                offspring.push_back(std::move(kid));
                ++produced;
            }
        }
    }

    // Crossover: complementary pairs on the training batch.
    if (state.population.size() >= 2 && crossover_budget > 0) {
        std::vector<ScoredInstruction> train_scored;
        train_scored.reserve(state.population.size());
        for (std::size_t pi : parent_order) {
            const Instruction& parent = state.population[pi];
            ScoredInstruction s;
            s.instruction = parent;
            s.objectives.ek = detail::mean_utility(parent, train_ek, cached, utility);
            s.objectives.nek = detail::mean_utility(parent, train_nek, cached, utility);
            train_scored.push_back(std::move(s));
        }
        const auto pairs = select_crossover_pairs(
            train_scored, static_cast<int>(state.population.size()), rng);
        if (!pairs.empty()) {
            const int base = crossover_budget / static_cast<int>(pairs.size());
            const int extra = crossover_budget % static_cast<int>(pairs.size());
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const int quota = base + (static_cast<int>(i) < extra ? 1 : 0);
                if (quota == 0) continue;
                const Instruction& a = train_scored[pairs[i].first].instruction;
                const Instruction& b = train_scored[pairs[i].second].instruction;
                const auto sets = build_contrastive_sets(a, b, train_ek, train_nek, cached,
                                                         config.example_limits);
                try {
                    auto kids = crossover(op_llm, templates, a, b, sets, quota, ids,
                                          config.example_limits);
                    for (auto& kid : kids) offspring.push_back(std::move(kid));
                } catch (const operator_error& e) {
                    if (e.code() != operator_code::no_parsable_output) throw;
                }
            }
        }
    }

    // Drop texts already present among the parents or earlier offspring, then
    // enforce the expansion cap.
    std::set<std::string> known;
    for (const auto& p : state.population) known.insert(p.text);
    std::vector<Instruction> fresh;
    fresh.reserve(offspring.size());
    for (auto& kid : offspring) {
        if (!known.insert(kid.text).second) continue;
        fresh.push_back(std::move(kid));
    }
    const std::size_t cap =
        static_cast<std::size_t>(config.expansion_factor) * state.population.size();
    if (fresh.size() > cap) fresh.resize(cap);

    // --- Evaluation --------------------------------------------------------
    std::vector<Instruction> pool;
    pool.reserve(state.population.size() + fresh.size());
    for (std::size_t pi : parent_order) pool.push_back(state.population[pi]);
    for (auto& kid : fresh) pool.push_back(std::move(kid));

    std::vector<Instance> val_ek;
    std::vector<Instance> val_nek;
    if (config.val_batch_ek > 0 || config.val_batch_nek > 0) {
        std::mt19937_64 fixed_rng(config.seed ^ 0x76616c6261746368ull); // used in fixed-batch mode
        std::mt19937_64& val_rng = config.resample_validation_each_round ? rng : fixed_rng;
        val_ek = config.val_batch_ek > 0
                     ? detail::sample_batch(ek_data.validation, config.val_batch_ek, val_rng)
                     : ek_data.validation;
        val_nek = config.val_batch_nek > 0
                      ? detail::sample_batch(nek_data.validation, config.val_batch_nek, val_rng)
                      : nek_data.validation;
    } else {
        val_ek = ek_data.validation;
        val_nek = nek_data.validation;
    }
    const auto scored = evaluate_population(pool, val_ek, val_nek, cached, utility);

    // --- Selection ---------------------------------------------------------
    const auto front = pareto_front(scored);
    const auto next = select_top_by_crowding(front, config.pareto_budget);

    RunState out;
    out.round = state.round + 1;
    out.population.reserve(next.size());
    for (const auto& s : next) out.population.push_back(s.instruction);
    out.rng_state = detail::serialize_rng(rng);
    out.score_cache = cached.snapshot();
    out.history = state.history;
    RoundRecord record;
    record.round = state.round;
    record.candidates = scored;
    for (const auto& s : next) record.selected.push_back(s.instruction.id);
    out.history.push_back(std::move(record));
    out.next_id = ids.next;
    out.config = state.config;
    return out;
}

namespace detail {

inline void check_disjoint_split(const Dataset& data, std::string_view label) {
    if (data.train.empty() || data.validation.empty()) {
        throw validation_error(validation_code::invalid_config,
                               std::string(label) + " dataset needs non-empty train and "
                                                    "validation splits");
    }
    std::set<std::string_view> train_ids;
    for (const auto& inst : data.train) train_ids.insert(inst.query.id);
    for (const auto& inst : data.validation) {
        if (train_ids.count(inst.query.id)) {
            throw validation_error(validation_code::invalid_config,
                                   std::string(label) + " query '" + inst.query.id +
                                       "' appears in both train and validation");
        }
    }
}

// Score-cache keys identify requests by (instruction digest, query id,
// candidate id), so the two task datasets must not reuse query ids.
inline void check_distinct_datasets(const Dataset& ek, const Dataset& nek) {
    std::set<std::string_view> ek_ids;
    for (const auto& inst : ek.train) ek_ids.insert(inst.query.id);
    for (const auto& inst : ek.validation) ek_ids.insert(inst.query.id);
    for (const auto* pool : {&nek.train, &nek.validation}) {
        for (const auto& inst : *pool) {
            if (ek_ids.count(inst.query.id)) {
                throw validation_error(validation_code::invalid_config,
                                       "query id '" + inst.query.id +
                                           "' is used by both the EK and NEK datasets");
            }
        }
    }
}

} // namespace detail

// Fresh state with the seed instruction as the whole population.
inline RunState init_state(const OptimizerConfig& config) {
    config.validate();
    RunState state;
    state.config = config;
    IdAllocator ids;
    Instruction seed;
    seed.id = ids.allocate();
    seed.text = config.initial_instruction;
    seed.lineage = Lineage::make_seed();
    state.population.push_back(std::move(seed));
    state.next_id = ids.next;
    state.rng_state = detail::serialize_rng(std::mt19937_64(config.seed));
    return state;
}

// Continues a (possibly restored) state until the configured round count.
// The returned population is the final Pareto front, at most B members.
template <typename CheckpointHook>
inline RunState run_from_state(RunState state, const Dataset& ek_data, const Dataset& nek_data,
                               const Backend& backend, const OperatorLlm& op_llm,
                               const Templates& templates, CheckpointHook&& after_round) {
    detail::check_disjoint_split(ek_data, "EK");
    detail::check_disjoint_split(nek_data, "NEK");
    detail::check_distinct_datasets(ek_data, nek_data);
    while (state.round < state.config.rounds) {
        state = run_round(state, ek_data, nek_data, backend, op_llm, templates);
        after_round(state);
    }
    return state;
}

inline RunState run_from_state(RunState state, const Dataset& ek_data, const Dataset& nek_data,
                               const Backend& backend, const OperatorLlm& op_llm,
                               const Templates& templates = {}) {
    return run_from_state(std::move(state), ek_data, nek_data, backend, op_llm, templates,
                          [](const RunState&) {});
}

// Full Algorithm-style run: seed population, T rounds, final front.
inline RunState run_optimization(const OptimizerConfig& config, const Dataset& ek_data,
                                 const Dataset& nek_data, const Backend& backend,
                                 const OperatorLlm& op_llm, const Templates& templates = {}) {
    return run_from_state(init_state(config), ek_data, nek_data, backend, op_llm, templates);
}

} // namespace evorank
