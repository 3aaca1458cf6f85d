// ============================================================================
// stratsynth/report.hpp — human-readable and JSON result reports
// ============================================================================
//
// Counts are the stored truth; percentages are always recomputed from them.
// JSON output is deterministic (sorted keys, no timestamps), so identical
// runs produce byte-identical report files.
//
// ============================================================================

#pragma once

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratsynth/errors.hpp"
#include "stratsynth/scoring.hpp"

namespace stratsynth {

enum class ReportFormat : std::uint8_t { text, json };

struct Report {
    std::vector<ScoreReport> strategies;
    nlohmann::json metadata;  // config echo; deterministic content only
    std::vector<std::string> errors;
};

inline nlohmann::json score_report_to_json(const ScoreReport& rep) {
    nlohmann::json rows = nlohmann::json::array();
    for (const InstanceRow& row : rep.rows) {
        rows.push_back({{"instance", row.instance_id},
                        {"result", solve_result_text(row.result)},
                        {"wall_ms", row.wall_ms},
                        {"classification", classification_text(row.classification)}});
    }
    return nlohmann::json{{"strategy", rep.strategy},
                          {"strategy_key", rep.strategy_key},
                          {"timeout_ms", rep.timeout_ms},
                          {"total", rep.total},
                          {"solved", rep.solved},
                          {"correct", rep.correct},
                          {"wrong", rep.wrong},
                          {"percent_solved", rep.percent_solved},
                          {"par2", rep.par2},
                          {"par10", rep.par10},
                          {"rows", std::move(rows)}};
}

inline ScoreReport score_report_from_json(const nlohmann::json& j) {
    ScoreReport rep;
    rep.strategy = j.at("strategy").get<std::string>();
    rep.strategy_key = j.at("strategy_key").get<std::string>();
    rep.timeout_ms = j.at("timeout_ms").get<std::int64_t>();
    rep.total = j.at("total").get<int>();
    rep.solved = j.at("solved").get<int>();
    rep.correct = j.at("correct").get<int>();
    rep.wrong = j.at("wrong").get<int>();
    rep.percent_solved = j.at("percent_solved").get<double>();
    rep.par2 = j.at("par2").get<double>();
    rep.par10 = j.at("par10").get<double>();
    for (const auto& row : j.at("rows")) {
        InstanceRow r;
        r.instance_id = row.at("instance").get<std::string>();
        r.result = solve_result_from_text(row.at("result").get<std::string>());
        r.wall_ms = row.at("wall_ms").get<std::int64_t>();
        const std::string cls = row.at("classification").get<std::string>();
        r.classification = cls == "correct"   ? Classification::correct
                           : cls == "wrong"   ? Classification::wrong
                                              : Classification::unsolved;
        rep.rows.push_back(std::move(r));
    }
    return rep;
}

inline nlohmann::json report_to_json(const Report& report) {
    nlohmann::json strategies = nlohmann::json::array();
    for (const ScoreReport& rep : report.strategies)
        strategies.push_back(score_report_to_json(rep));
    nlohmann::json j{{"strategies", std::move(strategies)}, {"metadata", report.metadata}};
    if (!report.errors.empty()) j["errors"] = report.errors;
    return j;
}

inline std::string emit_report_text(const Report& report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(1);
    for (const ScoreReport& rep : report.strategies) {
        out << "strategy: " << rep.strategy << "\n";
        out << "  solved: " << rep.percent_solved << "%"
            << " (" << rep.correct << "/" << rep.total << " correct, " << rep.wrong
            << " wrong)\n";
        out << std::setprecision(3);
        out << "  par2:  " << rep.par2 << " s\n";
        out << "  par10: " << rep.par10 << " s\n";
        out << std::setprecision(1);
    }
    for (const std::string& err : report.errors) out << "error: " << err << "\n";
    return out.str();
}

inline std::string emit_report(const Report& report, ReportFormat format) {
    if (format == ReportFormat::text) return emit_report_text(report);
    return report_to_json(report).dump(2) + "\n";
}

}  // namespace stratsynth
