// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Everything runs against the in-repo scripted backend and
// mock operator model, so the whole suite is deterministic and fast.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "evorank/checkpoint.hpp"
#include "evorank/dataio.hpp"
#include "evorank/evorank.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace evorank;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%s  criterion %d: %s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                detail.empty() ? "" : ("  [" + detail + "]").c_str());
    if (!ok) ++failures;
}

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// --- criterion 1: metric oracle equivalence --------------------------------

void criterion_metric_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(0xACCE97ull);
    bool ok = true;
    double worst = 0.0;

    std::vector<Ranking> rankings;
    std::vector<Instance> instances;
    std::vector<double> oracle_aps;

    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const auto labels = testutil::random_labels(rng, 12, 1, 4);
        auto inst = testutil::make_instance("q" + std::to_string(trial), labels);
        std::map<std::string, double> scores;
        for (const auto& c : inst.candidates) {
            scores[c.id] = static_cast<double>(rng() % 1000) / 999.0;
        }
        Instruction instruction;
        instruction.id = "acc";
        instruction.text = "acceptance";
        const auto ranking = rank(testutil::MapBackend(scores), instruction, inst);
        const auto rels = relevance_by_rank(ranking, inst);

        const auto close = [&](double a, double b) {
            worst = std::max(worst, std::abs(a - b));
            return std::abs(a - b) <= 1e-9;
        };
        ok = ok && close(average_precision(ranking, inst), oracle::average_precision(rels));
        for (int k : {5, 10}) {
            ok = ok && close(reciprocal_rank_at_k(ranking, inst, k),
                             oracle::reciprocal_rank_at_k(rels, k));
            ok = ok && close(ndcg_at_k(ranking, inst, k), oracle::ndcg_at_k(rels, k));
            ok = ok && close(hit_rate_at_k(ranking, inst, k), oracle::hit_rate_at_k(rels, k));
        }
        oracle_aps.push_back(oracle::average_precision(rels));
        rankings.push_back(ranking);
        instances.push_back(std::move(inst));
    }

    double oracle_map = 0.0;
    for (double ap : oracle_aps) oracle_map += ap;
    oracle_map /= static_cast<double>(oracle_aps.size());
    ok = ok && std::abs(mean_average_precision(rankings, instances) - oracle_map) <= 1e-9;

    const double seconds = elapsed_seconds(start);
    ok = ok && seconds < 5.0;
    std::ostringstream detail;
    detail << "1000 instances, max |delta| " << worst << ", " << seconds << "s";
    report(1, "metric oracle equivalence within 1e-9", ok, detail.str());
}

// --- criterion 2: pareto correctness ----------------------------------------

void criterion_pareto_oracle() {
    std::mt19937_64 rng(0xFA57F07ull);
    bool fronts_ok = true;
    bool extremes_ok = true;
    int pruned_checked = 0;

    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 64);
        std::vector<ScoredInstruction> pool;
        std::vector<oracle::Point> points;
        for (int i = 0; i < n; ++i) {
            ScoredInstruction s;
            char id[16];
            std::snprintf(id, sizeof(id), "p%03d", i);
            s.instruction.id = id;
            s.instruction.text = std::string("text ") + id;
            s.objectives = {static_cast<double>(rng() % 33) / 32.0,
                            static_cast<double>(rng() % 33) / 32.0};
            points.push_back({s.objectives.ek, s.objectives.nek});
            pool.push_back(std::move(s));
        }
        const auto expected = oracle::pareto_front_indices(points);
        const auto front = pareto_front(pool);
        if (front.size() != expected.size()) {
            fronts_ok = false;
            break;
        }
        for (std::size_t i = 0; i < expected.size(); ++i) {
            fronts_ok = fronts_ok &&
                        front[i].instruction.id == pool[expected[i]].instruction.id;
        }

        const int budget = 2 + static_cast<int>(rng() % 3);
        if (front.size() > static_cast<std::size_t>(budget)) {
            ++pruned_checked;
            const auto kept = select_top_by_crowding(front, budget);
            double best_ek = -1.0;
            double best_nek = -1.0;
            for (const auto& s : front) {
                best_ek = std::max(best_ek, s.objectives.ek);
                best_nek = std::max(best_nek, s.objectives.nek);
            }
            bool has_ek = false;
            bool has_nek = false;
            for (const auto& s : kept) {
                has_ek = has_ek || s.objectives.ek == best_ek;
                has_nek = has_nek || s.objectives.nek == best_nek;
            }
            extremes_ok = extremes_ok && has_ek && has_nek &&
                          kept.size() == static_cast<std::size_t>(budget);
        }
    }
    report(2, "pareto front matches the all-pairs oracle and pruning keeps both extremes",
           fronts_ok && extremes_ok,
           "500 pools, " + std::to_string(pruned_checked) + " pruned fronts checked");
}

// --- criterion 3: crowding value check ---------------------------------------

void criterion_crowding_values() {
    std::vector<ScoredInstruction> front(3);
    front[0].instruction.id = "a";
    front[0].objectives = {0.0, 1.0};
    front[1].instruction.id = "b";
    front[1].objectives = {0.5, 0.5};
    front[2].instruction.id = "c";
    front[2].objectives = {1.0, 0.0};
    const auto dist = crowding_distance(front);
    const bool ok = std::isinf(dist.at("a")) && dist.at("b") == 2.0 && std::isinf(dist.at("c"));
    report(3, "crowding distances for {(0,1),(0.5,0.5),(1,0)} are (inf, 2, inf)", ok);
}

// --- criteria 4, 5, 7: the deterministic end-to-end run ----------------------

struct E2eArtifacts {
    OptimizerConfig config;
    Dataset ek;
    Dataset nek;
    RunState final_state;
};

E2eArtifacts run_e2e() {
    E2eArtifacts art;
    art.config.rounds = 5;
    art.config.pareto_budget = 4;
    art.config.expansion_factor = 8;
    art.config.seed = 20240601;
    art.ek = split_dataset(generate_synthetic_ek(100, 1001), 0.2);
    art.nek = split_dataset(
        synthesize_nek_timestamps(generate_synthetic_nek(100, 1002), 1003), 0.2);
    const ScriptedBackend backend;
    const MockOperatorLlm op_llm(art.config.seed);
    art.final_state = run_optimization(art.config, art.ek, art.nek, backend, op_llm);
    return art;
}

void criterion_end_to_end(const E2eArtifacts& art, double seconds) {
    const auto report_data = build_report(art.final_state);
    bool ok = report_data.baseline.has_value();
    std::string detail;

    const ScriptedConfig scripted_defaults;
    const ReportRow* winner = nullptr;
    for (const auto& row : report_data.final_front) {
        if (has_trigger_token(scripted_defaults, row.text)) {
            if (!winner || row.ek > winner->ek) winner = &row;
        }
    }
    ok = ok && winner != nullptr;
    if (ok) {
        const double ek_gain = winner->ek - report_data.baseline->ek;
        const double nek_drift = std::abs(winner->nek - report_data.baseline->nek);
        ok = ek_gain >= 0.20 && nek_drift <= 0.02;
        std::ostringstream s;
        s << "EK gain " << ek_gain << ", NEK drift " << nek_drift << ", " << seconds << "s";
        detail = s.str();
    } else {
        detail = "no trigger-token instruction on the final front";
    }

    // byte-identical repetition
    const ScriptedBackend backend;
    const MockOperatorLlm op_llm(art.config.seed);
    const auto again = run_optimization(art.config, art.ek, art.nek, backend, op_llm);
    ok = ok && nlohmann::json(again).dump() == nlohmann::json(art.final_state).dump();
    ok = ok && seconds < 60.0;

    report(4, "deterministic end-to-end optimization finds a recency instruction", ok, detail);
}

void criterion_report_shape(const E2eArtifacts& art) {
    // Published large-model numbers need the corresponding hosted re-ranker
    // and operator model; this artifact asserts the property-based criterion
    // above instead, and here only that the report renders the same
    // baseline-vs-front comparison shape once real backends are configured.
    const auto report_data = build_report(art.final_state);
    const auto markdown = render_markdown(report_data);
    bool ok = report_data.baseline.has_value() && !report_data.final_front.empty();
    ok = ok && markdown.find("(baseline)") != std::string::npos;
    ok = ok && markdown.find("| instruction | lineage | EK map | NEK map | text |") !=
                   std::string::npos;
    const nlohmann::json j = report_data;
    ok = ok && j.get<Report>() == report_data;
    report(5, "report renders a baseline-vs-front comparison; model-scale result levels "
              "require configured live backends",
           ok);
}

void criterion_checkpoint_equivalence(const E2eArtifacts& art) {
    const ScriptedBackend backend;
    const MockOperatorLlm op_llm(art.config.seed);

    auto partial = init_state(art.config);
    partial = run_round(partial, art.ek, art.nek, backend, op_llm);
    partial = run_round(partial, art.ek, art.nek, backend, op_llm); // interrupted after round 2

    const auto path = std::filesystem::temp_directory_path() / "evorank_acceptance_ckpt.json";
    checkpoint_save(partial, path);
    const auto resumed =
        run_from_state(checkpoint_load(path), art.ek, art.nek, backend, op_llm);

    const bool ok =
        nlohmann::json(resumed).dump() == nlohmann::json(art.final_state).dump() &&
        nlohmann::json(resumed.population).dump() ==
            nlohmann::json(art.final_state.population).dump();
    report(7, "resume after round 2 reproduces the uninterrupted final front byte-for-byte", ok);
}

// --- criterion 6: obsolete ratio fixture -------------------------------------

void criterion_obsolete_ratio() {
    using NT = NegativeType;
    // q1: positive at rank 4 with 2 outdated + 1 insufficient above.
    auto i1 = testutil::make_instance("q1", {0, 0, 0, 1, 0},
                                      {NT::outdated, NT::outdated, NT::insufficient,
                                       NT::unspecified, NT::insufficient});
    Ranking r1;
    r1.query_id = "q1";
    r1.order = {"c1", "c2", "c3", "c4", "c5"};
    // q2: positive at rank 2 with 1 outdated above.
    auto i2 = testutil::make_instance("q2", {0, 1, 0}, {NT::outdated, NT::unspecified,
                                                        NT::insufficient});
    Ranking r2;
    r2.query_id = "q2";
    r2.order = {"c1", "c2", "c3"};
    // q3: positive already on top.
    auto i3 = testutil::make_instance("q3", {1, 0}, {NT::unspecified, NT::outdated});
    Ranking r3;
    r3.query_id = "q3";
    r3.order = {"c1", "c2"};

    const auto ratio = obsolete_ratio({r1, r2, r3}, {i1, i2, i3}, true);
    bool ok = ratio.has_value() && *ratio == 0.75; // pooled: 3 outdated of 4 above-positive

    auto clean1 = testutil::make_instance("qa", {1, 0}, {NT::unspecified, NT::outdated});
    Ranking cr1;
    cr1.query_id = "qa";
    cr1.order = {"c1", "c2"};
    const auto no_errors = obsolete_ratio({cr1}, {clean1}, true);
    ok = ok && !no_errors.has_value();

    report(6, "obsolete ratio pools to exactly 0.75 and signals no-errors", ok);
}

// --- criterion 8: timestamp contract ------------------------------------------

void criterion_timestamp_contract() {
    std::mt19937_64 rng(0x7157a3ull);
    const std::int64_t hi = Timestamp::from_civil(2101, 1, 1).seconds();
    bool ok = true;
    for (int i = 0; i < 10000 && ok; ++i) {
        const Timestamp t(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi)));
        const auto s = t.to_string();
        ok = s.size() == 20 && Timestamp::parse(s) == t;
    }

    const std::filesystem::path golden =
        std::filesystem::path(EVORANK_TEST_DATA_DIR) / "render_golden.txt";
    std::ifstream in(golden, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string rendered;
    rendered += render_with_timestamp("Who coaches X?", Timestamp::from_civil(2025, 8, 31));
    rendered += "\n---\n";
    rendered += render_with_timestamp("What is the latest stable release of the engine?",
                                      Timestamp::from_civil(2024, 11, 5, 9, 30, 15));
    rendered += "\n---\n";
    rendered += render_with_timestamp("", Timestamp::from_civil(2020, 1, 1));
    rendered += "\n";
    ok = ok && in.good() && rendered == buf.str();

    report(8, "10k timestamps round-trip and rendering matches the golden file", ok);
}

// --- criterion 9: scripted trigger invariant ----------------------------------

void criterion_trigger_invariant() {
    const ScriptedConfig config;
    std::mt19937_64 rng(0x9e11aull);
    const char* vocab[] = {"one", "two", "three", "four", "five", "six", "seven", "eight"};
    bool ok = true;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        std::string qt;
        std::string ct;
        for (int i = 0; i < 5; ++i) qt += std::string(vocab[rng() % 8]) + " ";
        for (int i = 0; i < 7; ++i) ct += std::string(vocab[rng() % 8]) + " ";
        Query q;
        q.text = qt;
        q.timestamp = Timestamp(86400LL * static_cast<std::int64_t>(2000 + rng() % 2000));
        Candidate c;
        c.text = ct;
        const std::int64_t gap_days = static_cast<std::int64_t>(rng() % 1400);
        c.timestamp = Timestamp(q.timestamp.seconds() - gap_days * 86400);

        const double plain = scripted_score(config, "retrieve passages for the query", q, c);
        const double triggered =
            scripted_score(config, "retrieve the latest passages for the query", q, c);
        if (static_cast<double>(gap_days) < config.horizon_days) {
            ok = triggered >= plain;
        } else {
            ok = triggered == plain;
        }
    }
    report(9, "trigger tokens never hurt fresh candidates nor touch stale ones", ok,
           "1000 random pairs");
}

} // namespace

int main() {
    criterion_metric_oracle();
    criterion_pareto_oracle();
    criterion_crowding_values();

    const auto start = std::chrono::steady_clock::now();
    const auto art = run_e2e();
    const double e2e_seconds = elapsed_seconds(start);
    criterion_end_to_end(art, e2e_seconds);
    criterion_report_shape(art);
    criterion_obsolete_ratio();
    criterion_checkpoint_equivalence(art);
    criterion_timestamp_contract();
    criterion_trigger_invariant();

    if (failures > 0) {
        std::printf("%d criterion check(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
