#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evorank/digest.hpp"
#include "evorank/errors.hpp"
#include "evorank/serialization.hpp"

namespace evorank {

struct ReportRow {
    int round = 0;
    std::string id;
    std::string text;
    std::string lineage;
    double ek = 0.0;
    double nek = 0.0;
    bool selected = false;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

// Everything needed to chart a run: per-round objective estimates for every
// candidate, the final front, and the seed baseline. All numbers come
// straight out of the run history.
struct Report {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string utility;
    int rounds_completed = 0;
    std::optional<ReportRow> baseline;
    std::vector<ReportRow> final_front;
    std::vector<ReportRow> series; // one row per candidate per round

    friend bool operator==(const Report&, const Report&) = default;
};

inline void to_json(nlohmann::json& j, const ReportRow& r) {
    j = nlohmann::json{{"round", r.round}, {"id", r.id},   {"text", r.text},
                       {"lineage", r.lineage}, {"ek", r.ek}, {"nek", r.nek},
                       {"selected", r.selected}};
}
inline void from_json(const nlohmann::json& j, ReportRow& r) {
    j.at("round").get_to(r.round);
    j.at("id").get_to(r.id);
    j.at("text").get_to(r.text);
    j.at("lineage").get_to(r.lineage);
    j.at("ek").get_to(r.ek);
    j.at("nek").get_to(r.nek);
    j.at("selected").get_to(r.selected);
}

inline void to_json(nlohmann::json& j, const Report& r) {
    j = nlohmann::json{{"config_digest", r.config_digest},
                       {"seed", r.seed},
                       {"utility", r.utility},
                       {"rounds_completed", r.rounds_completed},
                       {"final_front", r.final_front},
                       {"series", r.series}};
    if (r.baseline) j["baseline"] = *r.baseline;
}
inline void from_json(const nlohmann::json& j, Report& r) {
    j.at("config_digest").get_to(r.config_digest);
    j.at("seed").get_to(r.seed);
    j.at("utility").get_to(r.utility);
    j.at("rounds_completed").get_to(r.rounds_completed);
    j.at("final_front").get_to(r.final_front);
    j.at("series").get_to(r.series);
    if (j.contains("baseline")) {
        r.baseline = j.at("baseline").get<ReportRow>();
    } else {
        r.baseline.reset();
    }
}

namespace detail {

inline std::string lineage_label(const Lineage& l) {
    switch (l.kind) {
    case LineageKind::seed: return "seed";
    case LineageKind::mutation: return "mutation(" + l.parent_a + ")";
    case LineageKind::crossover: return "crossover(" + l.parent_a + "," + l.parent_b + ")";
    }
    return "?";
}

inline ReportRow row_from(const ScoredInstruction& s, int round, bool selected) {
    ReportRow row;
    row.round = round;
    row.id = s.instruction.id;
    row.text = s.instruction.text;
    row.lineage = lineage_label(s.instruction.lineage);
    row.ek = s.objectives.ek;
    row.nek = s.objectives.nek;
    row.selected = selected;
    return row;
}

} // namespace detail

inline Report build_report(const RunState& state) {
    Report report;
    report.config_digest = digest_hex(nlohmann::json(state.config).dump());
    report.seed = state.config.seed;
    report.utility = state.config.utility;
    report.rounds_completed = state.round;

    for (const auto& record : state.history) {
        std::set<std::string> selected(record.selected.begin(), record.selected.end());
        for (const auto& cand : record.candidates) {
            report.series.push_back(
                detail::row_from(cand, record.round, selected.count(cand.instruction.id) > 0));
            if (!report.baseline && cand.instruction.lineage.kind == LineageKind::seed &&
                record.round == 0) {
                report.baseline = report.series.back();
            }
        }
    }
    if (!state.history.empty()) {
        const auto& last = state.history.back();
        std::set<std::string> selected(last.selected.begin(), last.selected.end());
        for (const auto& cand : last.candidates) {
            if (selected.count(cand.instruction.id)) {
                report.final_front.push_back(detail::row_from(cand, last.round, true));
            }
        }
    } else {
        for (const auto& p : state.population) {
            ReportRow row;
            row.round = state.round;
            row.id = p.id;
            row.text = p.text;
            row.lineage = detail::lineage_label(p.lineage);
            if (p.objectives) {
                row.ek = p.objectives->ek;
                row.nek = p.objectives->nek;
            }
            row.selected = true;
            report.final_front.push_back(std::move(row));
        }
    }
    return report;
}

namespace detail {

inline std::string md_escape(std::string text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '|') {
            out += "\\|";
        } else if (c == '\n') {
            out += ' ';
        } else {
            out += c;
        }
    }
    return out;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace detail

// Plot-ready series: one row per candidate per round.
inline std::string render_csv(const Report& report) {
    std::string out = "round,id,ek,nek,selected\n";
    for (const auto& row : report.series) {
        out += std::to_string(row.round) + "," + row.id + "," + detail::fmt(row.ek) + "," +
               detail::fmt(row.nek) + "," + (row.selected ? "1" : "0") + "\n";
    }
    return out;
}

// Human-readable summary with a baseline-vs-front comparison table.
inline std::string render_markdown(const Report& report) {
    std::string out;
    out += "# Instruction optimization report\n\n";
    out += "- config digest: `" + report.config_digest + "`\n";
    out += "- seed: " + std::to_string(report.seed) + "\n";
    out += "- utility: " + report.utility + "\n";
    out += "- rounds completed: " + std::to_string(report.rounds_completed) + "\n\n";

    out += "## Final Pareto front vs. baseline\n\n";
    out += "| instruction | lineage | EK " + report.utility + " | NEK " + report.utility +
           " | text |\n";
    out += "|---|---|---:|---:|---|\n";
    if (report.baseline) {
        const auto& b = *report.baseline;
        out += "| " + b.id + " (baseline) | " + b.lineage + " | " + detail::fmt(b.ek) + " | " +
               detail::fmt(b.nek) + " | " + detail::md_escape(b.text) + " |\n";
    }
    for (const auto& row : report.final_front) {
        out += "| " + row.id + " | " + row.lineage + " | " + detail::fmt(row.ek) + " | " +
               detail::fmt(row.nek) + " | " + detail::md_escape(row.text) + " |\n";
    }

    out += "\n## Candidates per round\n\n";
    out += "| round | id | EK | NEK | selected |\n";
    out += "|---:|---|---:|---:|:--|\n";
    for (const auto& row : report.series) {
        out += "| " + std::to_string(row.round) + " | " + row.id + " | " + detail::fmt(row.ek) +
               " | " + detail::fmt(row.nek) + " | " + (row.selected ? "yes" : "no") + " |\n";
    }
    return out;
}

enum class ReportFormat { json, csv, markdown };

inline ReportFormat report_format_from_string(const std::string& s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    if (s == "markdown" || s == "md") return ReportFormat::markdown;
    throw validation_error(validation_code::invalid_config, "unknown report format '" + s + "'");
}

inline void write_report(const RunState& state, ReportFormat format,
                         const std::filesystem::path& path) {
    const Report report = build_report(state);
    std::string payload;
    switch (format) {
    case ReportFormat::json: payload = nlohmann::json(report).dump(2) + "\n"; break;
    case ReportFormat::csv: payload = render_csv(report); break;
    case ReportFormat::markdown: payload = render_markdown(report); break;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open report file " + path.string() + " for writing");
    out << payload;
    if (!out) throw io_error("failed writing report " + path.string());
}

} // namespace evorank
