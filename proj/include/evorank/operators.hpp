#pragma once

#include <algorithm>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "evorank/backend.hpp"
#include "evorank/digest.hpp"
#include "evorank/errors.hpp"
#include "evorank/operator_llm.hpp"
#include "evorank/pareto.hpp"
#include "evorank/prompt_templates.hpp"
#include "evorank/types.hpp"

namespace evorank {

// One query an instruction got wrong: the positive plus the negatives ranked
// above it.
struct ErrorInstance {
    Query query;
    Candidate positive;
    std::vector<Candidate> offenders; // in rank order, best first
};

// A natural-language critique of an instruction, derived from its errors.
struct TextualGradient {
    std::string text;
    std::string source_instruction_id;
};

// Instances where one crossover parent succeeded and the other failed.
// a_wins holds EK instances won by the EK-stronger parent A (offenders taken
// from B's ranking); b_wins holds NEK instances won by B.
struct ContrastiveSets {
    std::vector<ErrorInstance> a_wins;
    std::vector<ErrorInstance> b_wins;
};

// Bounds on how much evidence is embedded into operator prompts.
struct ExampleLimits {
    int max_examples = 4;
    int max_offenders = 2;
    int passage_chars = 600;
};

// Sequentially numbered instruction ids ("p0000" is the seed).
struct IdAllocator {
    std::uint64_t next = 0;

    std::string allocate() {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "p%04llu", static_cast<unsigned long long>(next++));
        return buf;
    }
};

// Extracts the substrings strictly between matched <START>/<END> pairs,
// trimmed of surrounding whitespace. Each <START> is matched with the next
// <END>; unmatched delimiters contribute nothing.
inline std::vector<std::string> parse_delimited_blocks(std::string_view reply) {
    static constexpr std::string_view open = "<START>";
    static constexpr std::string_view close = "<END>";
    std::vector<std::string> blocks;
    std::size_t pos = 0;
    while (true) {
        const std::size_t begin = reply.find(open, pos);
        if (begin == std::string_view::npos) break;
        const std::size_t end = reply.find(close, begin + open.size());
        if (end == std::string_view::npos) break;
        std::string_view body = reply.substr(begin + open.size(), end - begin - open.size());
        while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front())))
            body.remove_prefix(1);
        while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back())))
            body.remove_suffix(1);
        blocks.emplace_back(body);
        pos = end + close.size();
    }
    return blocks;
}

namespace detail {

inline std::string truncate_passage(std::string_view text, int limit) {
    if (limit > 0 && text.size() > static_cast<std::size_t>(limit)) {
        return std::string(text.substr(0, static_cast<std::size_t>(limit))) + " ...[truncated]";
    }
    return std::string(text);
}

} // namespace detail

// Renders error instances into the prompt-embedded example format. Query and
// passages carry their timestamps; passages are truncated to keep operator
// context bounded.
inline std::string serialize_error_examples(const std::vector<ErrorInstance>& errors,
                                            const ExampleLimits& limits = {}) {
    if (errors.empty()) return "(none)";
    std::string out;
    const int n = std::min<int>(static_cast<int>(errors.size()), limits.max_examples);
    for (int i = 0; i < n; ++i) {
        const auto& e = errors[static_cast<std::size_t>(i)];
        if (i > 0) out += "\n";
        out += "### Example " + std::to_string(i + 1) + "\n";
        out += "Query: " + render_with_timestamp(e.query.text, e.query.timestamp) + "\n";
        out += "Positive Document: " +
               render_with_timestamp(detail::truncate_passage(e.positive.text, limits.passage_chars),
                                     e.positive.timestamp) +
               "\n";
        const int m = std::min<int>(static_cast<int>(e.offenders.size()), limits.max_offenders);
        for (int j = 0; j < m; ++j) {
            const auto& o = e.offenders[static_cast<std::size_t>(j)];
            out += "Negative Document " + std::to_string(j + 1) + ": " +
                   render_with_timestamp(detail::truncate_passage(o.text, limits.passage_chars),
                                         o.timestamp) +
                   "\n";
        }
    }
    return out;
}

// Ranks each instance of the batch under the instruction and collects, per
// failing query, the negatives ranked above the (top-ranked) positive. An
// instance counts as a success exactly when no negative precedes a positive,
// i.e. the positive sits at rank 1.
inline std::vector<ErrorInstance> compute_error_set(const Instruction& instruction,
                                                    const std::vector<Instance>& batch,
                                                    const Backend& backend) {
    std::vector<ErrorInstance> errors;
    for (const auto& inst : batch) {
        const Ranking ranking = rank(backend, instruction, inst);
        std::map<std::string_view, const Candidate*> by_id;
        for (const auto& c : inst.candidates) by_id.emplace(c.id, &c);
        ErrorInstance err;
        err.query = inst.query;
        bool found_positive = false;
        for (const auto& id : ranking.order) {
            const Candidate* c = by_id.at(id);
            if (c->label == 1) {
                err.positive = *c;
                found_positive = true;
                break;
            }
            err.offenders.push_back(*c);
        }
        if (found_positive && !err.offenders.empty()) errors.push_back(std::move(err));
    }
    return errors;
}

namespace detail {

// One operator call with a single re-ask on unparsable output.
inline std::vector<std::string> call_and_parse(const OperatorLlm& llm, OperatorRequest req) {
    auto blocks = parse_delimited_blocks(llm.complete(req));
    if (blocks.empty()) {
        req.prompt += "\n\nReminder: wrap every item individually with <START> and <END>.";
        blocks = parse_delimited_blocks(llm.complete(req));
    }
    if (blocks.empty()) {
        throw operator_error(operator_code::no_parsable_output,
                             std::string(to_string(req.kind)) +
                                 ": no <START>/<END> blocks in operator reply after retry");
    }
    return blocks;
}

} // namespace detail

// Asks the operator LLM for at most num_gradients failure analyses of an
// instruction, given its error set.
inline std::vector<TextualGradient> estimate_gradients(const OperatorLlm& llm,
                                                       const Templates& templates,
                                                       const Instruction& instruction,
                                                       const std::vector<ErrorInstance>& errors,
                                                       int num_gradients,
                                                       const ExampleLimits& limits = {}) {
    if (errors.empty()) {
        throw validation_error(validation_code::invalid_config,
                               "estimate_gradients: error set is empty; mutation should be "
                               "skipped for error-free instructions");
    }
    OperatorRequest req;
    req.kind = OperatorKind::gradient_estimation;
    req.expected_blocks = num_gradients;
    req.prompt = fill_template(templates.gradient_estimation,
                               {{"current_prompt", instruction.text},
                                {"error_string", serialize_error_examples(errors, limits)},
                                {"num_gradients", std::to_string(num_gradients)}});
    auto blocks = detail::call_and_parse(llm, req);
    if (blocks.size() > static_cast<std::size_t>(num_gradients)) {
        blocks.resize(static_cast<std::size_t>(num_gradients));
    }
    std::vector<TextualGradient> gradients;
    gradients.reserve(blocks.size());
    for (auto& b : blocks) gradients.push_back({std::move(b), instruction.id});
    return gradients;
}

// Applies one textual gradient, yielding up to steps_per_gradient mutated
// instructions. Exact-duplicate replies collapse and no-op rewrites (text
// equal to the parent) are discarded.
inline std::vector<Instruction> apply_gradient(const OperatorLlm& llm, const Templates& templates,
                                               const Instruction& instruction,
                                               const std::vector<ErrorInstance>& errors,
                                               const TextualGradient& gradient,
                                               int steps_per_gradient, IdAllocator& ids,
                                               const ExampleLimits& limits = {}) {
    OperatorRequest req;
    req.kind = OperatorKind::gradient_application;
    req.expected_blocks = steps_per_gradient;
    req.prompt = fill_template(templates.gradient_application,
                               {{"current_prompt", instruction.text},
                                {"error_str", serialize_error_examples(errors, limits)},
                                {"gradient_str", gradient.text},
                                {"steps_per_gradient", std::to_string(steps_per_gradient)}});
    auto blocks = detail::call_and_parse(llm, req);
    if (blocks.size() > static_cast<std::size_t>(steps_per_gradient)) {
        blocks.resize(static_cast<std::size_t>(steps_per_gradient));
    }
    std::vector<Instruction> children;
    for (const auto& text : blocks) {
        if (text == instruction.text) continue;
        const bool duplicate = std::any_of(children.begin(), children.end(),
                                           [&](const Instruction& c) { return c.text == text; });
        if (duplicate) continue;
        Instruction child;
        child.id = ids.allocate();
        child.text = text;
        child.lineage = Lineage::make_mutation(instruction.id, digest_hex(gradient.text));
        children.push_back(std::move(child));
    }
    return children;
}

// Picks parent pairs with complementary strengths on the training batch:
// pairs whose utility deltas have opposite signs, ranked by |dEK|*|dNEK|.
// Each pair is oriented so that .first is the EK-stronger parent. When no
// complementary pair exists, falls back to seeded random distinct pairs.
inline std::vector<std::pair<std::size_t, std::size_t>> select_crossover_pairs(
    const std::vector<ScoredInstruction>& population, int num_pairs, std::mt19937_64& rng) {
    if (population.size() < 2) {
        throw validation_error(validation_code::population_too_small,
                               "select_crossover_pairs: need at least 2 instructions");
    }
    struct Entry {
        std::size_t a;
        std::size_t b;
        double score;
    };
    std::vector<Entry> complementary;
    std::vector<std::pair<std::size_t, std::size_t>> all;
    for (std::size_t i = 0; i < population.size(); ++i) {
        for (std::size_t j = i + 1; j < population.size(); ++j) {
            all.emplace_back(i, j);
            const auto& ui = population[i].objectives;
            const auto& uj = population[j].objectives;
            const double dek = ui.ek - uj.ek;
            const double dnek = ui.nek - uj.nek;
            if ((dek > 0 && dnek < 0) || (dek < 0 && dnek > 0)) {
                const std::size_t a = dek > 0 ? i : j; // EK-stronger first
                const std::size_t b = dek > 0 ? j : i;
                complementary.push_back({a, b, std::abs(dek) * std::abs(dnek)});
            }
        }
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (!complementary.empty()) {
        std::sort(complementary.begin(), complementary.end(), [&](const Entry& x, const Entry& y) {
            if (x.score != y.score) return x.score > y.score;
            if (population[x.a].instruction.id != population[y.a].instruction.id)
                return population[x.a].instruction.id < population[y.a].instruction.id;
            return population[x.b].instruction.id < population[y.b].instruction.id;
        });
        for (const auto& e : complementary) pairs.emplace_back(e.a, e.b);
    } else {
        // Fisher-Yates with explicit modulo so the draw sequence is identical
        // on every platform.
        for (std::size_t i = all.size(); i > 1; --i) {
            std::swap(all[i - 1], all[rng() % i]);
        }
        for (auto [i, j] : all) {
            const auto& ui = population[i].objectives;
            const auto& uj = population[j].objectives;
            const bool i_stronger =
                ui.ek != uj.ek ? ui.ek > uj.ek
                               : (ui.nek != uj.nek ? ui.nek > uj.nek
                                                   : population[i].instruction.id <
                                                         population[j].instruction.id);
            pairs.emplace_back(i_stronger ? i : j, i_stronger ? j : i);
        }
    }
    if (pairs.size() > static_cast<std::size_t>(num_pairs)) {
        pairs.resize(static_cast<std::size_t>(num_pairs));
    }
    return pairs;
}

namespace detail {

// Positive at rank 1 under this backend and instruction?
inline bool succeeds(const Backend& backend, const Instruction& instruction,
                     const Instance& inst) {
    const Ranking ranking = rank(backend, instruction, inst);
    for (const auto& c : inst.candidates) {
        if (c.id == ranking.order.front()) return c.label == 1;
    }
    return false;
}

inline ErrorInstance losing_record(const Backend& backend, const Instruction& loser,
                                   const Instance& inst) {
    auto errs = compute_error_set(loser, {inst}, backend);
    if (!errs.empty()) return std::move(errs.front());
    ErrorInstance e; // loser succeeded too; record the query with no offenders
    e.query = inst.query;
    for (const auto& c : inst.candidates) {
        if (c.label == 1) {
            e.positive = c;
            break;
        }
    }
    return e;
}

} // namespace detail

// Builds the contrastive evidence for one ordered parent pair (A EK-stronger):
// EK instances where A puts the positive first and B does not, and NEK
// instances where B does and A does not. Offenders come from the failing
// parent's ranking. Either side may come out empty.
inline ContrastiveSets build_contrastive_sets(const Instruction& parent_a,
                                              const Instruction& parent_b,
                                              const std::vector<Instance>& ek_batch,
                                              const std::vector<Instance>& nek_batch,
                                              const Backend& backend,
                                              const ExampleLimits& limits = {}) {
    ContrastiveSets sets;
    for (const auto& inst : ek_batch) {
        if (static_cast<int>(sets.a_wins.size()) >= limits.max_examples) break;
        if (detail::succeeds(backend, parent_a, inst) && !detail::succeeds(backend, parent_b, inst)) {
            sets.a_wins.push_back(detail::losing_record(backend, parent_b, inst));
        }
    }
    for (const auto& inst : nek_batch) {
        if (static_cast<int>(sets.b_wins.size()) >= limits.max_examples) break;
        if (detail::succeeds(backend, parent_b, inst) && !detail::succeeds(backend, parent_a, inst)) {
            sets.b_wins.push_back(detail::losing_record(backend, parent_a, inst));
        }
    }
    return sets;
}

// Synthesizes hybrid children from two parents and their contrastive sets.
// Children duplicating either parent or an earlier sibling are dropped.
inline std::vector<Instruction> crossover(const OperatorLlm& llm, const Templates& templates,
                                          const Instruction& parent_a, const Instruction& parent_b,
                                          const ContrastiveSets& sets, int num_crossovers,
                                          IdAllocator& ids, const ExampleLimits& limits = {}) {
    OperatorRequest req;
    req.kind = OperatorKind::crossover;
    req.expected_blocks = num_crossovers;
    req.prompt = fill_template(templates.crossover,
                               {{"prompt_a", parent_a.text},
                                {"prompt_b", parent_b.text},
                                {"examples_a_wins", serialize_error_examples(sets.a_wins, limits)},
                                {"examples_b_wins", serialize_error_examples(sets.b_wins, limits)},
                                {"num_crossovers", std::to_string(num_crossovers)}});
    auto blocks = detail::call_and_parse(llm, req);
    if (blocks.size() > static_cast<std::size_t>(num_crossovers)) {
        blocks.resize(static_cast<std::size_t>(num_crossovers));
    }
    std::vector<Instruction> children;
    for (const auto& text : blocks) {
        if (text == parent_a.text || text == parent_b.text) continue;
        const bool duplicate = std::any_of(children.begin(), children.end(),
                                           [&](const Instruction& c) { return c.text == text; });
        if (duplicate) continue;
        Instruction child;
        child.id = ids.allocate();
        child.text = text;
        child.lineage = Lineage::make_crossover(parent_a.id, parent_b.id);
        children.push_back(std::move(child));
    }
    return children;
}

} // namespace evorank
