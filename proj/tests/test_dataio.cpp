#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "evorank/dataio.hpp"
#include "evorank/report.hpp"
#include "evorank/scripted_backend.hpp"
#include "test_support.hpp"

using namespace evorank;
using Catch::Approx;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (const auto& line : lines) out << line << '\n';
}

const char* good_line_1 =
    R"({"query_id":"q1","query_text":"who leads team x","query_timestamp":"2024-06-01T00:00:00Z","objective":"EK","candidates":[{"id":"c1","text":"the new leader","timestamp":"2024-05-30T00:00:00Z","label":1},{"id":"c2","text":"the old leader","timestamp":"2021-01-01T00:00:00Z","label":0,"negative_type":"outdated"}]})";
const char* good_line_2 =
    R"({"query_id":"q2","query_text":"stadium capacity","query_timestamp":"2024-06-01T00:00:00Z","objective":"NEK","candidates":[{"id":"c1","text":"capacity figure","timestamp":"2024-01-01T00:00:00Z","label":1},{"id":"c2","text":"ticket prices","timestamp":"2024-01-01T00:00:00Z","label":0}]})";

} // namespace

TEST_CASE("load_instances parses well-formed JSONL") {
    const auto path = temp_file("evorank_good.jsonl");
    write_lines(path, {good_line_1, good_line_2});
    const auto instances = load_instances(path);
    REQUIRE(instances.size() == 2);
    CHECK(instances[0].query.id == "q1");
    CHECK(instances[0].source_objective == Objective::ek);
    CHECK(instances[0].candidates[1].negative_type == NegativeType::outdated);
    CHECK(instances[1].candidates[1].negative_type == NegativeType::unspecified);
    CHECK(instances[1].source_objective == Objective::nek);
}

TEST_CASE("load_instances reports the offending line or query") {
    SECTION("broken JSON carries the line number") {
        const auto path = temp_file("evorank_broken.jsonl");
        write_lines(path, {good_line_1, "{not json"});
        try {
            load_instances(path);
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line() == 2);
        }
    }
    SECTION("an instance without a positive names its query") {
        const auto path = temp_file("evorank_nopos.jsonl");
        write_lines(
            path,
            {R"({"query_id":"qx","query_text":"t","query_timestamp":"2024-06-01T00:00:00Z","objective":"EK","candidates":[{"id":"c1","text":"a","timestamp":"2024-01-01T00:00:00Z","label":0}]})"});
        try {
            load_instances(path);
            FAIL("expected validation_error");
        } catch (const validation_error& e) {
            CHECK(e.code() == validation_code::no_positive);
            CHECK(std::string(e.what()).find("qx") != std::string::npos);
        }
    }
    SECTION("duplicate query ids are rejected file-wide") {
        const auto path = temp_file("evorank_dupq.jsonl");
        write_lines(path, {good_line_1, good_line_1});
        CHECK_THROWS_AS(load_instances(path), validation_error);
    }
    SECTION("strict mode rejects untyped negatives") {
        const auto path = temp_file("evorank_untyped.jsonl");
        write_lines(path, {good_line_2});
        CHECK_NOTHROW(load_instances(path, false));
        try {
            load_instances(path, true);
            FAIL("expected validation_error");
        } catch (const validation_error& e) {
            CHECK(e.code() == validation_code::unspecified_negative_type);
        }
    }
    SECTION("missing files are io errors") {
        CHECK_THROWS_AS(load_instances(temp_file("evorank_missing.jsonl")), io_error);
    }
    SECTION("bad timestamps carry the line number") {
        const auto path = temp_file("evorank_badts.jsonl");
        write_lines(
            path,
            {R"({"query_id":"q","query_text":"t","query_timestamp":"June 1st","objective":"EK","candidates":[{"id":"c1","text":"a","timestamp":"2024-01-01T00:00:00Z","label":1}]})"});
        try {
            load_instances(path);
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line() == 1);
        }
    }
}

TEST_CASE("save and load round-trip a dataset") {
    const auto original = generate_synthetic_ek(25, 3);
    const auto path = temp_file("evorank_roundtrip.jsonl");
    save_instances(original, path);
    const auto loaded = load_instances(path, true); // EK fixtures are fully typed
    REQUIRE(loaded.size() == original.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i] == original[i]);
    }
}

TEST_CASE("synthesize_nek_timestamps is a pure seeded transform") {
    const auto base = generate_synthetic_nek(12, 9);
    const auto a = synthesize_nek_timestamps(base, 100);
    const auto b = synthesize_nek_timestamps(base, 100);
    const auto c = synthesize_nek_timestamps(base, 101);

    SECTION("same seed reproduces identical timestamps") {
        CHECK(a == b);
    }
    SECTION("different seeds give different timestamps somewhere") {
        bool any_difference = false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].query.timestamp != c[i].query.timestamp) any_difference = true;
        }
        CHECK(any_difference);
    }
    SECTION("texts and labels pass through untouched") {
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].query.text == base[i].query.text);
            REQUIRE(a[i].candidates.size() == base[i].candidates.size());
            for (std::size_t j = 0; j < a[i].candidates.size(); ++j) {
                CHECK(a[i].candidates[j].text == base[i].candidates[j].text);
                CHECK(a[i].candidates[j].label == base[i].candidates[j].label);
            }
        }
    }
    SECTION("timestamps land inside the configured range") {
        for (const auto& inst : a) {
            CHECK(inst.query.timestamp >= default_nek_range_lo);
            CHECK(inst.query.timestamp < default_nek_range_hi);
        }
    }
}

TEST_CASE("synthetic EK instances realize both ranking guarantees") {
    const auto instances = generate_synthetic_ek(100, 77);
    const ScriptedBackend backend;
    Instruction plain;
    plain.id = "a";
    plain.text = "retrieve relevant passages that answer the query";
    Instruction triggered;
    triggered.id = "b";
    triggered.text = "retrieve the most recent passages that answer the query";

    for (const auto& inst : instances) {
        const auto find_positive = [&](const Ranking& r) {
            for (std::size_t i = 0; i < r.order.size(); ++i) {
                for (const auto& c : inst.candidates) {
                    if (c.id == r.order[i] && c.label == 1) return i + 1;
                }
            }
            return std::size_t{0};
        };
        const auto plain_rank = rank(backend, plain, inst);
        const auto positive_position = find_positive(plain_rank);
        CHECK(positive_position > 1); // guarantee 1: not at rank 1 without a trigger

        // ... and specifically the outdated negative sits above the positive
        bool outdated_above = false;
        for (std::size_t i = 0; i + 1 < positive_position; ++i) {
            for (const auto& c : inst.candidates) {
                if (c.id == plain_rank.order[i] && c.negative_type == NegativeType::outdated) {
                    outdated_above = true;
                }
            }
        }
        CHECK(outdated_above);
        CHECK(find_positive(rank(backend, triggered, inst)) == 1); // guarantee 2
    }

    SECTION("structure: one outdated hard negative, >=3 same-date insufficient") {
        for (const auto& inst : instances) {
            int outdated = 0;
            int insufficient = 0;
            const Candidate* positive = nullptr;
            for (const auto& c : inst.candidates) {
                if (c.label == 1) positive = &c;
            }
            REQUIRE(positive != nullptr);
            for (const auto& c : inst.candidates) {
                if (c.negative_type == NegativeType::outdated) {
                    ++outdated;
                    CHECK(lexical_overlap(inst.query.text, c.text) >
                          lexical_overlap(inst.query.text, positive->text));
                }
                if (c.negative_type == NegativeType::insufficient) {
                    ++insufficient;
                    CHECK(c.timestamp == positive->timestamp);
                }
            }
            CHECK(outdated == 1);
            CHECK(insufficient >= 3);
        }
    }

    SECTION("rejects nonsense sizes") {
        CHECK_THROWS_AS(generate_synthetic_ek(0, 1), validation_error);
        CHECK_THROWS_AS(generate_synthetic_nek(0, 1), validation_error);
    }
}

TEST_CASE("synthetic NEK instances are recency-insensitive") {
    const auto instances = synthesize_nek_timestamps(generate_synthetic_nek(60, 5), 6);
    const ScriptedBackend backend;
    Instruction plain;
    plain.id = "a";
    plain.text = "retrieve relevant passages";
    Instruction triggered;
    triggered.id = "b";
    triggered.text = "retrieve the most recent and current passages";

    const auto top_is_positive = [](const Ranking& r, const Instance& inst) {
        for (const auto& c : inst.candidates) {
            if (c.id == r.order.front()) return c.label == 1;
        }
        return false;
    };
    for (const auto& inst : instances) {
        // The trigger may shuffle negatives among themselves, but the
        // positive stays on top under any instruction and any timestamps, so
        // the NEK utility cannot depend on the instruction.
        CHECK(top_is_positive(rank(backend, plain, inst), inst));
        CHECK(top_is_positive(rank(backend, triggered, inst), inst));
    }
}

TEST_CASE("split_dataset cuts a deterministic prefix") {
    const auto instances = generate_synthetic_nek(10, 1);
    const auto data = split_dataset(instances, 0.2);
    CHECK(data.train.size() == 2);
    CHECK(data.validation.size() == 8);
    CHECK(data.train[0] == instances[0]);
    CHECK_THROWS_AS(split_dataset(instances, 0.0), validation_error);
    CHECK_THROWS_AS(split_dataset(instances, 1.0), validation_error);
    CHECK_THROWS_AS(split_dataset({instances[0]}, 0.5), validation_error);

    const auto tiny = split_dataset(generate_synthetic_nek(2, 1), 0.01);
    CHECK(tiny.train.size() == 1); // both sides keep at least one instance
    CHECK(tiny.validation.size() == 1);
}
