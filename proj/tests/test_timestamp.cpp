#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "evorank/timestamp.hpp"
#include "evorank/types.hpp"

using evorank::Timestamp;

TEST_CASE("timestamp serializes in the fixed UTC layout") {
    CHECK(Timestamp(0).to_string() == "1970-01-01T00:00:00Z");
    CHECK(Timestamp::from_civil(2025, 8, 31).to_string() == "2025-08-31T00:00:00Z");
    CHECK(Timestamp::from_civil(2024, 2, 29, 23, 59, 59).to_string() == "2024-02-29T23:59:59Z");
    CHECK(Timestamp::from_civil(2100, 12, 31, 23, 59, 59).to_string() == "2100-12-31T23:59:59Z");
}

TEST_CASE("timestamp parse is the exact inverse of to_string") {
    CHECK(Timestamp::parse("1970-01-01T00:00:00Z").seconds() == 0);
    CHECK(Timestamp::parse("2025-08-31T00:00:00Z") == Timestamp::from_civil(2025, 8, 31));

    // 10k random second-precision instants in [1970, 2100] round-trip.
    std::mt19937_64 rng(20240601);
    const std::int64_t lo = 0;
    const std::int64_t hi = Timestamp::from_civil(2101, 1, 1).seconds();
    for (int i = 0; i < 10000; ++i) {
        const Timestamp t(lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo)));
        const std::string s = t.to_string();
        REQUIRE(s.size() == 20);
        REQUIRE(Timestamp::parse(s) == t);
    }
}

TEST_CASE("timestamp parse rejects malformed and impossible inputs") {
    const char* bad[] = {
        "",
        "2024-06-01",
        "2024-06-01 12:00:00Z",
        "2024-06-01T12:00:00",
        "2024-6-01T12:00:00Z",
        "2024-13-01T12:00:00Z",
        "2024-00-10T12:00:00Z",
        "2024-06-31T12:00:00Z",
        "2023-02-29T12:00:00Z", // not a leap year
        "2100-02-29T12:00:00Z", // century rule: 2100 is not a leap year
        "2024-06-01T24:00:00Z",
        "2024-06-01T12:60:00Z",
        "2024-06-01T12:00:60Z",
        "2024-06-01Txx:00:00Z",
    };
    for (const char* s : bad) {
        INFO(s);
        CHECK_FALSE(Timestamp::try_parse(s).has_value());
        CHECK_THROWS_AS(Timestamp::parse(s), evorank::parse_error);
    }
    CHECK(Timestamp::try_parse("2024-02-29T12:00:00Z").has_value());
    CHECK(Timestamp::try_parse("2000-02-29T12:00:00Z").has_value());
}

TEST_CASE("days_between is symmetric and second-accurate") {
    const auto a = Timestamp::from_civil(2024, 1, 1);
    const auto b = Timestamp::from_civil(2024, 1, 2, 12, 0, 0);
    CHECK(evorank::days_between(a, b) == Catch::Approx(1.5));
    CHECK(evorank::days_between(b, a) == Catch::Approx(1.5));
    CHECK(evorank::days_between(a, a) == 0.0);
}

TEST_CASE("render_with_timestamp matches the conditioning template") {
    const auto t = Timestamp::from_civil(2025, 8, 31);
    CHECK(evorank::render_with_timestamp("Who coaches X?", t) ==
          "Who coaches X?\nTimestamp: 2025-08-31T00:00:00Z");
    CHECK(evorank::render_with_timestamp("", Timestamp::from_civil(2020, 1, 1)) ==
          "\nTimestamp: 2020-01-01T00:00:00Z");
}

TEST_CASE("render_with_timestamp adds exactly 32 characters") {
    std::mt19937_64 rng(7);
    const auto t = Timestamp::from_civil(2024, 3, 15, 6, 30, 0);
    for (int i = 0; i < 200; ++i) {
        std::string text;
        const std::size_t len = rng() % 300;
        for (std::size_t j = 0; j < len; ++j) {
            text += static_cast<char>('a' + rng() % 26);
        }
        CHECK(evorank::render_with_timestamp(text, t).size() == text.size() + 32);
    }
}

TEST_CASE("render output matches the golden fixture byte for byte") {
    const std::filesystem::path golden = std::filesystem::path(EVORANK_TEST_DATA_DIR) /
                                         "render_golden.txt";
    std::ifstream in(golden, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();

    std::string rendered;
    rendered += evorank::render_with_timestamp("Who coaches X?",
                                               Timestamp::from_civil(2025, 8, 31));
    rendered += "\n---\n";
    rendered += evorank::render_with_timestamp(
        "What is the latest stable release of the engine?",
        Timestamp::from_civil(2024, 11, 5, 9, 30, 15));
    rendered += "\n---\n";
    rendered += evorank::render_with_timestamp("", Timestamp::from_civil(2020, 1, 1));
    rendered += "\n";
    CHECK(rendered == buf.str());
}

TEST_CASE("strip_timestamp_suffix inverts rendering") {
    const auto t = Timestamp::from_civil(2023, 7, 4, 1, 2, 3);
    std::mt19937_64 rng(99);
    for (int i = 0; i < 200; ++i) {
        std::string text;
        const std::size_t len = rng() % 120;
        for (std::size_t j = 0; j < len; ++j) {
            const int pick = static_cast<int>(rng() % 27);
            text += pick == 26 ? ' ' : static_cast<char>('a' + pick);
        }
        const auto [body, parsed] = evorank::strip_timestamp_suffix(
            evorank::render_with_timestamp(text, t));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == t);
        CHECK(body == text);
    }

    const auto [body, parsed] = evorank::strip_timestamp_suffix("plain text, no timestamp");
    CHECK_FALSE(parsed.has_value());
    CHECK(body == "plain text, no timestamp");
}
