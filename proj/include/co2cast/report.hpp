#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "co2cast/benchmark.hpp"
#include "co2cast/error.hpp"
#include "co2cast/scheduler.hpp"
#include "co2cast/series.hpp"

namespace co2cast {

/// CSV cells carry 6 significant digits; JSON keeps full precision.
inline std::string csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::string csv_cell(const std::optional<double>& v) {
    return v ? csv_number(*v) : std::string();
}

/// Write one CSV table with a fixed header; deterministic bytes for
/// identical inputs.
inline void write_table(const std::string& path, const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) raise(errc::io_error, "cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    }
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
        }
    }
}

// ---------------------------------------------------------------------------
// JSON serialization of reports
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ErrorReport& report) {
    nlohmann::json j;
    j["rmse"] = report.rmse;
    j["mae"] = report.mae;
    if (report.mape) {
        j["mape"] = *report.mape;
    } else {
        j["mape"] = nullptr;
    }
    j["n"] = report.n;
    return j;
}

inline ErrorReport error_report_from_json(const nlohmann::json& j) {
    ErrorReport report;
    report.rmse = j.at("rmse").get<double>();
    report.mae = j.at("mae").get<double>();
    if (!j.at("mape").is_null()) report.mape = j.at("mape").get<double>();
    report.n = j.at("n").get<std::size_t>();
    return report;
}

inline nlohmann::json to_json(const BenchmarkReport& report) {
    nlohmann::json j;
    j["n_patches"] = report.n_patches;
    j["patch_len"] = report.patch_len;
    j["horizon"] = report.horizon;
    j["seed"] = report.seed;
    j["methods"] = nlohmann::json::array();
    for (const auto& m : report.methods) {
        nlohmann::json jm;
        jm["name"] = m.name;
        jm["mean"] = to_json(m.mean);
        jm["failures"] = m.failures;
        jm["per_patch"] = nlohmann::json::array();
        for (const auto& p : m.per_patch) {
            jm["per_patch"].push_back(p ? to_json(*p) : nlohmann::json(nullptr));
        }
        j["methods"].push_back(std::move(jm));
    }
    return j;
}

inline BenchmarkReport benchmark_report_from_json(const nlohmann::json& j) {
    BenchmarkReport report;
    report.n_patches = j.at("n_patches").get<std::size_t>();
    report.patch_len = j.at("patch_len").get<std::size_t>();
    report.horizon = j.at("horizon").get<std::size_t>();
    report.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jm : j.at("methods")) {
        MethodBenchmark m;
        m.name = jm.at("name").get<std::string>();
        m.mean = error_report_from_json(jm.at("mean"));
        m.failures = jm.at("failures").get<std::size_t>();
        for (const auto& p : jm.at("per_patch")) {
            if (p.is_null()) {
                m.per_patch.emplace_back(std::nullopt);
            } else {
                m.per_patch.emplace_back(error_report_from_json(p));
            }
        }
        report.methods.push_back(std::move(m));
    }
    return report;
}

inline nlohmann::json to_json(const SavingsReport& report) {
    nlohmann::json j;
    j["days"] = report.days;
    j["baseline"] = report.baseline == BaselineKind::hour_set ? "hour-set" : "contiguous-block";
    j["rows"] = nlohmann::json::array();
    for (const auto& row : report.rows) {
        j["rows"].push_back({{"duration", row.duration},
                             {"scheduled", row.scheduled_mean},
                             {"baseline", row.baseline_mean},
                             {"ratio", row.ratio}});
    }
    return j;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) raise(errc::io_error, "cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

} // namespace co2cast
