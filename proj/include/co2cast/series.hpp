#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "co2cast/error.hpp"
#include "co2cast/rng.hpp"

namespace co2cast {

// ---------------------------------------------------------------------------
// Hour timestamps
// ---------------------------------------------------------------------------

/// Hours since 1970-01-01T00:00:00Z. All timestamps are UTC; there is no
/// DST arithmetic anywhere in the library.
using hour_t = std::int64_t;

namespace detail {

/// Days since 1970-01-01 for a civil date (Gregorian, proleptic).
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

} // namespace detail

/// Parse `YYYY-MM-DDTHH:00:00Z` (minutes/seconds must be zero) into an hour index.
inline hour_t parse_hour_timestamp(const std::string& text) {
    int y = 0, mo = 0, dd = 0, hh = 0, mi = 0, ss = 0;
    char t = 0, z = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d%c", &y, &mo, &dd, &t, &hh, &mi, &ss, &z) != 8 ||
        (t != 'T' && t != ' ') || z != 'Z' || mo < 1 || mo > 12 || dd < 1 || dd > 31 ||
        hh < 0 || hh > 23 || mi != 0 || ss != 0) {
        raise(errc::malformed_row, "bad timestamp '" + text + "'");
    }
    return detail::days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(dd)) * 24 + hh;
}

inline std::string format_hour_timestamp(hour_t hour) {
    std::int64_t days = hour / 24;
    int hh = static_cast<int>(hour % 24);
    if (hh < 0) {
        hh += 24;
        --days;
    }
    int y;
    unsigned m, d;
    detail::civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:00:00Z", y, m, d, hh);
    return buf;
}

// ---------------------------------------------------------------------------
// HourlySeries
// ---------------------------------------------------------------------------

/// Uniformly sampled hourly series of CO2 intensity [gCO2eq/kWh].
/// Timestamps are implied: sample i sits at start_hour + i. Missing samples
/// (present only between load_csv and fill_gaps) are stored as NaN.
struct HourlySeries {
    hour_t start_hour = 0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    bool has_missing() const {
        return std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); });
    }
    hour_t hour_at(std::size_t index) const { return start_hour + static_cast<hour_t>(index); }
};

/// Forecast error metrics. MAPE is reported in percent and left unset when
/// any observed value is zero (division undefined).
struct ErrorReport {
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> mape;
    std::size_t n = 0;
};

/// Monte-Carlo patch geometry: (start, train_length, horizon) triples, all
/// lying fully inside the source series.
struct Patch {
    std::size_t start = 0;
    std::size_t train_length = 0;
    std::size_t horizon = 0;
};

struct PatchSet {
    std::vector<Patch> patches;
    std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_value_cell(const std::string& cell, std::size_t row) {
    if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || !std::isfinite(v)) {
        raise(errc::malformed_row, "bad numeric value '" + cell + "' at row " + std::to_string(row));
    }
    return v;
}

} // namespace detail

/// Load an hourly CSV (`timestamp,intensity`; empty cell = missing). Rows must
/// advance by exactly one hour.
inline HourlySeries load_csv(std::istream& in) {
    HourlySeries series;
    std::string line;
    std::size_t row = 0;
    bool have_start = false;
    hour_t expected = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::strip(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            raise(errc::malformed_row, "missing comma at row " + std::to_string(row));
        }
        const std::string left = detail::strip(line.substr(0, comma));
        const std::string right = detail::strip(line.substr(comma + 1));
        if (row == 1 && left == "timestamp") continue; // header
        const hour_t hour = parse_hour_timestamp(left);
        if (!have_start) {
            series.start_hour = hour;
            expected = hour;
            have_start = true;
        }
        if (hour != expected) {
            raise(errc::non_hourly_step,
                  "expected " + format_hour_timestamp(expected) + ", got " + format_hour_timestamp(hour));
        }
        series.values.push_back(detail::parse_value_cell(right, row));
        ++expected;
    }
    if (series.values.empty()) raise(errc::empty_file, "no data rows");
    return series;
}

inline HourlySeries load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::io_error, "cannot open '" + path + "'");
    return load_csv(in);
}

inline void write_csv(const HourlySeries& series, std::ostream& out) {
    out << "timestamp,intensity\n";
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_hour_timestamp(series.hour_at(i)) << ',';
        if (std::isnan(series.values[i])) {
            out << '\n';
        } else {
            std::snprintf(buf, sizeof(buf), "%.17g", series.values[i]);
            out << buf << '\n';
        }
    }
}

inline void write_csv(const HourlySeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(errc::io_error, "cannot open '" + path + "' for writing");
    write_csv(series, out);
}

// ---------------------------------------------------------------------------
// Gap handling, splitting, metrics, patch sampling
// ---------------------------------------------------------------------------

/// Replace missing runs of at most max_gap samples by linear interpolation
/// between the bounding observed values.
inline HourlySeries fill_gaps(const HourlySeries& series, std::size_t max_gap = 6) {
    HourlySeries out = series;
    auto& v = out.values;
    if (v.empty()) return out;
    if (std::isnan(v.front()) || std::isnan(v.back())) {
        raise(errc::missing_at_boundary, "series starts or ends with a missing value");
    }
    std::size_t i = 0;
    while (i < v.size()) {
        if (!std::isnan(v[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < v.size() && std::isnan(v[j])) ++j;
        const std::size_t run = j - i;
        if (run > max_gap) {
            raise(errc::gap_too_long, "missing run of " + std::to_string(run) + " > max_gap " +
                                          std::to_string(max_gap));
        }
        const double lo = v[i - 1];
        const double hi = v[j];
        for (std::size_t k = 0; k < run; ++k) {
            v[i + k] = lo + (hi - lo) * static_cast<double>(k + 1) / static_cast<double>(run + 1);
        }
        i = j;
    }
    return out;
}

inline std::pair<HourlySeries, HourlySeries> split_train_validation(const HourlySeries& series,
                                                                    std::size_t train_len,
                                                                    std::size_t horizon) {
    if (train_len < 1 || horizon < 1 || train_len + horizon > series.size()) {
        raise(errc::out_of_range, "train " + std::to_string(train_len) + " + horizon " +
                                      std::to_string(horizon) + " does not fit length " +
                                      std::to_string(series.size()));
    }
    HourlySeries train{series.start_hour,
                       {series.values.begin(), series.values.begin() + static_cast<std::ptrdiff_t>(train_len)}};
    HourlySeries validation{series.start_hour + static_cast<hour_t>(train_len),
                            {series.values.begin() + static_cast<std::ptrdiff_t>(train_len),
                             series.values.begin() + static_cast<std::ptrdiff_t>(train_len + horizon)}};
    return {std::move(train), std::move(validation)};
}

/// RMSE, MAE and MAPE of a forecast against observations.
inline ErrorReport compute_errors(const std::vector<double>& observed,
                                  const std::vector<double>& forecast) {
    if (observed.size() != forecast.size()) {
        raise(errc::length_mismatch, "observed " + std::to_string(observed.size()) + " vs forecast " +
                                         std::to_string(forecast.size()));
    }
    if (observed.empty()) raise(errc::length_mismatch, "empty inputs");
    const std::size_t n = observed.size();
    double sq = 0.0, abs_sum = 0.0, pct_sum = 0.0;
    bool zero_observed = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = observed[i] - forecast[i];
        sq += diff * diff;
        abs_sum += std::abs(diff);
        if (observed[i] == 0.0) {
            zero_observed = true;
        } else {
            pct_sum += std::abs(diff) / observed[i];
        }
    }
    ErrorReport report;
    report.n = n;
    report.rmse = std::sqrt(sq / static_cast<double>(n));
    report.mae = abs_sum / static_cast<double>(n);
    if (!zero_observed) report.mape = pct_sum / static_cast<double>(n) * 100.0;
    return report;
}

inline ErrorReport compute_errors(const HourlySeries& observed, const HourlySeries& forecast) {
    return compute_errors(observed.values, forecast.values);
}

/// Draw n patch start indices uniformly from [0, length - patch_len]
/// (duplicates allowed). Pure function of (length, n, patch_len, seed).
inline PatchSet monte_carlo_patches(std::size_t series_length, std::size_t n, std::size_t train_len,
                                    std::size_t horizon, std::uint64_t seed) {
    const std::size_t patch_len = train_len + horizon;
    if (patch_len > series_length) {
        raise(errc::patch_too_long, "patch " + std::to_string(patch_len) + " > series " +
                                        std::to_string(series_length));
    }
    if (n < 1) raise(errc::out_of_range, "need at least one patch");
    PatchSet set;
    set.seed = seed;
    set.patches.reserve(n);
    Rng rng(derive_stream(seed, "patches", 0));
    const std::uint64_t span = static_cast<std::uint64_t>(series_length - patch_len) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        set.patches.push_back(Patch{static_cast<std::size_t>(rng.next_below(span)), train_len, horizon});
    }
    return set;
}

inline PatchSet monte_carlo_patches(const HourlySeries& series, std::size_t n, std::size_t train_len,
                                    std::size_t horizon, std::uint64_t seed) {
    return monte_carlo_patches(series.size(), n, train_len, horizon, seed);
}

/// Extract the sub-series covered by one patch (train + horizon).
inline HourlySeries slice(const HourlySeries& series, std::size_t start, std::size_t length) {
    if (start + length > series.size()) raise(errc::out_of_range, "slice beyond series end");
    return HourlySeries{series.start_hour + static_cast<hour_t>(start),
                        {series.values.begin() + static_cast<std::ptrdiff_t>(start),
                         series.values.begin() + static_cast<std::ptrdiff_t>(start + length)}};
}

// Small descriptive helpers shared across modules.
inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

inline double stddev_of(const std::vector<double>& v) { return std::sqrt(variance_of(v)); }

} // namespace co2cast
