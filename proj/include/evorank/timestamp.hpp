#pragma once

#include <cctype>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

#include "evorank/errors.hpp"

namespace evorank {

namespace detail {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// civil-days algorithm).
constexpr std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct civil_date {
    int year;
    unsigned month;
    unsigned day;
};

constexpr civil_date civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {static_cast<int>(y + (m <= 2)), m, d};
}

constexpr bool is_leap_year(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

constexpr unsigned days_in_month(int y, unsigned m) {
    constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap_year(y)) return 29;
    return lengths[m - 1];
}

} // namespace detail

// A UTC instant with second precision. Serializes as `YYYY-MM-DDThh:mm:ssZ`
// (proleptic Gregorian, no leap seconds); parse(serialize(t)) == t for any
// representable instant with year in [0000, 9999].
class Timestamp {
public:
    Timestamp() = default;
    explicit Timestamp(std::int64_t unix_seconds) : seconds_(unix_seconds) {}

    static Timestamp from_civil(int year, unsigned month, unsigned day,
                                unsigned hour = 0, unsigned minute = 0, unsigned second = 0) {
        const std::int64_t days = detail::days_from_civil(year, static_cast<int>(month),
                                                          static_cast<int>(day));
        return Timestamp(days * 86400 + static_cast<std::int64_t>(hour) * 3600 +
                         static_cast<std::int64_t>(minute) * 60 + second);
    }

    static std::optional<Timestamp> try_parse(std::string_view text) {
        if (text.size() != 20) return std::nullopt;
        static constexpr std::string_view layout = "dddd-dd-ddTdd:dd:ddZ";
        for (std::size_t i = 0; i < layout.size(); ++i) {
            const char want = layout[i];
            const char got = text[i];
            if (want == 'd') {
                if (!std::isdigit(static_cast<unsigned char>(got))) return std::nullopt;
            } else if (got != want) {
                return std::nullopt;
            }
        }
        const auto num = [&](std::size_t pos, std::size_t len) {
            int v = 0;
            for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (text[i] - '0');
            return v;
        };
        const int year = num(0, 4);
        const int month = num(5, 2);
        const int day = num(8, 2);
        const int hour = num(11, 2);
        const int minute = num(14, 2);
        const int second = num(17, 2);
        if (month < 1 || month > 12) return std::nullopt;
        if (day < 1 || day > static_cast<int>(detail::days_in_month(year, static_cast<unsigned>(month))))
            return std::nullopt;
        if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
        return from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day),
                          static_cast<unsigned>(hour), static_cast<unsigned>(minute),
                          static_cast<unsigned>(second));
    }

    static Timestamp parse(std::string_view text) {
        auto ts = try_parse(text);
        if (!ts) throw parse_error("invalid timestamp: '" + std::string(text) + "'");
        return *ts;
    }

    std::string to_string() const {
        std::int64_t days = seconds_ / 86400;
        std::int64_t rem = seconds_ % 86400;
        if (rem < 0) {
            rem += 86400;
            days -= 1;
        }
        const auto date = detail::civil_from_days(days);
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", date.year,
                      date.month, date.day, static_cast<long long>(rem / 3600),
                      static_cast<long long>((rem / 60) % 60), static_cast<long long>(rem % 60));
        return std::string(buf);
    }

    std::int64_t seconds() const { return seconds_; }

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;

private:
    std::int64_t seconds_ = 0;
};

// Absolute gap between two instants, in (fractional) days.
inline double days_between(Timestamp a, Timestamp b) {
    const std::int64_t diff = a.seconds() >= b.seconds() ? a.seconds() - b.seconds()
                                                         : b.seconds() - a.seconds();
    return static_cast<double>(diff) / 86400.0;
}

} // namespace evorank
