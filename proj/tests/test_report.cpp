#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "evorank/dataio.hpp"
#include "evorank/operator_llm.hpp"
#include "evorank/report.hpp"
#include "evorank/scripted_backend.hpp"

using namespace evorank;

namespace {

RunState finished_mock_run(std::uint64_t seed, int rounds) {
    OptimizerConfig config;
    config.rounds = rounds;
    config.seed = seed;
    config.train_batch_ek = 8;
    config.train_batch_nek = 8;
    const auto ek = split_dataset(generate_synthetic_ek(30, seed), 0.25);
    const auto nek =
        split_dataset(synthesize_nek_timestamps(generate_synthetic_nek(30, seed + 1), seed + 2),
                      0.25);
    const ScriptedBackend backend;
    const MockOperatorLlm op_llm(seed);
    return run_optimization(config, ek, nek, backend, op_llm);
}

} // namespace

TEST_CASE("report rows are derived from the run history") {
    const auto state = finished_mock_run(7, 2);
    const auto report = build_report(state);

    CHECK(report.rounds_completed == 2);
    CHECK(report.utility == "map");
    REQUIRE(report.baseline.has_value());
    CHECK(report.baseline->round == 0);
    CHECK(report.baseline->lineage == "seed");
    CHECK(report.final_front.size() == state.population.size());

    std::size_t expected_rows = 0;
    for (const auto& record : state.history) expected_rows += record.candidates.size();
    CHECK(report.series.size() == expected_rows);
}

TEST_CASE("json report round-trips exactly") {
    const auto state = finished_mock_run(9, 2);
    const auto report = build_report(state);
    const nlohmann::json j = report;
    const auto parsed = j.get<Report>();
    CHECK(parsed == report);
}

TEST_CASE("csv series has one row per candidate per round") {
    const auto state = finished_mock_run(11, 3);
    const auto report = build_report(state);
    const auto csv = render_csv(report);

    std::size_t expected_rows = 0;
    for (const auto& record : state.history) expected_rows += record.candidates.size();
    const auto newlines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(newlines == expected_rows + 1); // header + rows
    CHECK(csv.rfind("round,id,ek,nek,selected\n", 0) == 0);
}

TEST_CASE("markdown report renders the baseline-vs-front comparison") {
    const auto state = finished_mock_run(13, 2);
    const auto markdown = render_markdown(build_report(state));
    CHECK(markdown.find("(baseline)") != std::string::npos);
    CHECK(markdown.find("Final Pareto front") != std::string::npos);
    CHECK(markdown.find("| instruction | lineage | EK map | NEK map | text |") !=
          std::string::npos);
    CHECK(markdown.find("Candidates per round") != std::string::npos);
}

TEST_CASE("write_report emits all three formats") {
    const auto state = finished_mock_run(15, 1);
    const auto dir = std::filesystem::temp_directory_path();

    write_report(state, ReportFormat::json, dir / "evorank_report.json");
    write_report(state, ReportFormat::csv, dir / "evorank_report.csv");
    write_report(state, ReportFormat::markdown, dir / "evorank_report.md");

    std::ifstream json_in(dir / "evorank_report.json");
    const auto parsed = nlohmann::json::parse(json_in).get<Report>();
    CHECK(parsed == build_report(state));

    CHECK_THROWS_AS(report_format_from_string("pdf"), validation_error);
    CHECK(report_format_from_string("md") == ReportFormat::markdown);
}
