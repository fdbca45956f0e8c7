#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "co2cast/benchmark.hpp"
#include "co2cast/error.hpp"
#include "co2cast/models.hpp"
#include "co2cast/series.hpp"

namespace co2cast {

/// The day-ahead market clears at noon; a 48-hour forecast issued then covers
/// day D+1 at forecast indices [12, 36).
inline constexpr std::size_t k_frame_hours = 48;
inline constexpr std::size_t k_window_begin = 12;
inline constexpr std::size_t k_window_hours = 24;

struct DayAheadFrame {
    hour_t issue_hour = 0; ///< 12:00 UTC of day D
    std::vector<double> forecast; ///< 48 values starting at issue_hour

    void validate() const {
        if (forecast.size() != k_frame_hours) {
            raise(errc::length_mismatch, "frame needs exactly 48 forecast values");
        }
        if (((issue_hour % 24) + 24) % 24 != 12) {
            raise(errc::config_error, "frames are issued at 12:00 UTC");
        }
    }
};

/// Chosen consumption hours (window-relative, ascending) with the forecast
/// mean V_F and, after evaluation, the realized mean V_V.
struct ScheduleResult {
    std::size_t duration = 0;
    std::vector<std::size_t> chosen_hours;
    double forecast_mean = 0.0;
    std::optional<double> realized_mean;
};

/// Pick the `duration` hours with the smallest forecast intensity inside the
/// day-ahead window; ties break to the earliest hour.
inline ScheduleResult schedule_flexible(const DayAheadFrame& frame, std::size_t duration) {
    frame.validate();
    if (duration < 1 || duration > k_window_hours) {
        raise(errc::bad_duration, "duration must be in 1..24");
    }
    std::vector<std::size_t> order(k_window_hours);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = frame.forecast[k_window_begin + a];
        const double vb = frame.forecast[k_window_begin + b];
        return va < vb || (va == vb && a < b);
    });

    ScheduleResult result;
    result.duration = duration;
    result.chosen_hours.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(duration));
    std::sort(result.chosen_hours.begin(), result.chosen_hours.end());
    double sum = 0.0;
    for (std::size_t h : result.chosen_hours) sum += frame.forecast[k_window_begin + h];
    result.forecast_mean = sum / static_cast<double>(duration);
    return result;
}

/// Fill in V_V from the 24 realized window values.
inline ScheduleResult evaluate_schedule(ScheduleResult result, const std::vector<double>& realized_window) {
    if (realized_window.size() != k_window_hours) {
        raise(errc::length_mismatch, "realized window needs exactly 24 values");
    }
    double sum = 0.0;
    for (std::size_t h : result.chosen_hours) sum += realized_window[h];
    result.realized_mean = sum / static_cast<double>(result.duration);
    return result;
}

// ---------------------------------------------------------------------------
// Savings analysis
// ---------------------------------------------------------------------------

/// Random-consumption baseline: expected emissions of d uniformly random
/// distinct hours (closed form, the default) or of a random contiguous
/// d-hour block.
enum class BaselineKind { hour_set, contiguous_block };

struct SavingsRow {
    std::size_t duration = 0;
    double scheduled_mean = 0.0; ///< mean over days of realized scheduled emissions
    double baseline_mean = 0.0;  ///< mean over days of the random baseline
    double ratio = 1.0;
};

struct SavingsReport {
    std::vector<SavingsRow> rows;
    std::size_t days = 0;
    BaselineKind baseline = BaselineKind::hour_set;
};

namespace scheduler_detail {

/// Indices at which a full frame can be issued: 12:00 UTC, enough history,
/// realized values for all 48 hours.
inline std::vector<std::size_t> issue_indices(const HourlySeries& series, std::size_t train_len) {
    std::vector<std::size_t> out;
    for (std::size_t i = train_len; i + k_frame_hours <= series.size(); ++i) {
        if (((series.hour_at(i) % 24) + 24) % 24 == 12) out.push_back(i);
    }
    return out;
}

inline double baseline_emissions(const std::vector<double>& window, std::size_t d, BaselineKind kind) {
    double window_sum = 0.0;
    for (double v : window) window_sum += v;
    if (kind == BaselineKind::hour_set) {
        // E[sum over d random distinct hours] = d/24 x window sum; exact at d = 24.
        return window_sum * (static_cast<double>(d) / static_cast<double>(k_window_hours));
    }
    const std::size_t n_starts = k_window_hours - d + 1;
    double total = 0.0;
    for (std::size_t s = 0; s < n_starts; ++s) {
        for (std::size_t i = 0; i < d; ++i) total += window[s + i];
    }
    return total / static_cast<double>(n_starts);
}

} // namespace scheduler_detail

/// Issue one frame per day, schedule every duration, and compare realized
/// scheduled emissions to the random baseline over all evaluated days.
/// `seed` is echoed for manifests; the evaluation itself is exhaustive.
inline SavingsReport annual_savings(const HourlySeries& series, const NamedMethod& method,
                                    const std::vector<std::size_t>& durations,
                                    std::size_t train_len = 1200,
                                    BaselineKind baseline = BaselineKind::hour_set,
                                    std::uint64_t seed = 0) {
    (void)seed;
    if (durations.empty()) raise(errc::bad_duration, "need at least one duration");
    for (std::size_t d : durations) {
        if (d < 1 || d > k_window_hours) raise(errc::bad_duration, "durations must be in 1..24");
    }
    if (series.size() < 60 * 24) raise(errc::insufficient_span, "need at least 60 days of data");
    const std::vector<std::size_t> issues = scheduler_detail::issue_indices(series, train_len);
    if (issues.empty()) raise(errc::insufficient_span, "no day admits history + full frame");

    std::vector<double> scheduled_sum(durations.size(), 0.0);
    std::vector<double> baseline_sum(durations.size(), 0.0);
    for (std::size_t issue : issues) {
        const HourlySeries train = slice(series, issue - train_len, train_len);
        const std::vector<double> truth(series.values.begin() + static_cast<std::ptrdiff_t>(issue),
                                        series.values.begin() + static_cast<std::ptrdiff_t>(issue + k_frame_hours));
        const Forecast forecast = run_method(method, train, k_frame_hours, &truth);
        DayAheadFrame frame{series.hour_at(issue), forecast.values};
        const std::vector<double> window(truth.begin() + k_window_begin,
                                         truth.begin() + k_window_begin + k_window_hours);
        for (std::size_t di = 0; di < durations.size(); ++di) {
            const std::size_t d = durations[di];
            const ScheduleResult result = evaluate_schedule(schedule_flexible(frame, d), window);
            scheduled_sum[di] += *result.realized_mean * static_cast<double>(d);
            baseline_sum[di] += scheduler_detail::baseline_emissions(window, d, baseline);
        }
    }

    SavingsReport report;
    report.days = issues.size();
    report.baseline = baseline;
    const double inv_days = 1.0 / static_cast<double>(issues.size());
    for (std::size_t di = 0; di < durations.size(); ++di) {
        SavingsRow row;
        row.duration = durations[di];
        row.scheduled_mean = scheduled_sum[di] * inv_days;
        row.baseline_mean = baseline_sum[di] * inv_days;
        row.ratio = scheduled_sum[di] / baseline_sum[di];
        report.rows.push_back(row);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Forecast/realized ratio statistics
// ---------------------------------------------------------------------------

struct RatioStatsRow {
    std::size_t hour = 0; ///< horizon position 0..47
    double mean = 0.0;
    double stddev = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

namespace scheduler_detail {

/// Linear-interpolation quantile of a sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

} // namespace scheduler_detail

/// Monte-Carlo distribution of forecast/realized per horizon position over
/// randomly chosen forecast origins; box-plot-ready (48 rows).
inline std::vector<RatioStatsRow> ratio_stats(const HourlySeries& series, const NamedMethod& method,
                                              std::size_t iterations, std::size_t train_len = 1200,
                                              std::uint64_t seed = 0) {
    if (iterations < 1) raise(errc::out_of_range, "need at least one iteration");
    if (series.size() < train_len + k_frame_hours) {
        raise(errc::insufficient_span, "series shorter than history + frame");
    }
    const std::uint64_t span = static_cast<std::uint64_t>(series.size() - train_len - k_frame_hours) + 1;
    Rng rng(derive_stream(seed, "ratio-stats", 0));

    std::vector<std::vector<double>> ratios(k_frame_hours);
    for (std::size_t it = 0; it < iterations; ++it) {
        const std::size_t origin = train_len + static_cast<std::size_t>(rng.next_below(span));
        const HourlySeries train = slice(series, origin - train_len, train_len);
        const std::vector<double> truth(series.values.begin() + static_cast<std::ptrdiff_t>(origin),
                                        series.values.begin() + static_cast<std::ptrdiff_t>(origin + k_frame_hours));
        const Forecast forecast = run_method(method, train, k_frame_hours, &truth);
        for (std::size_t h = 0; h < k_frame_hours; ++h) {
            if (truth[h] != 0.0) ratios[h].push_back(forecast.values[h] / truth[h]);
        }
    }

    std::vector<RatioStatsRow> rows(k_frame_hours);
    for (std::size_t h = 0; h < k_frame_hours; ++h) {
        RatioStatsRow& row = rows[h];
        row.hour = h;
        auto& sample = ratios[h];
        if (sample.empty()) continue;
        row.mean = mean_of(sample);
        row.stddev = sample.size() > 1 ? stddev_of(sample) : 0.0;
        std::sort(sample.begin(), sample.end());
        row.q1 = scheduler_detail::quantile_sorted(sample, 0.25);
        row.median = scheduler_detail::quantile_sorted(sample, 0.5);
        row.q3 = scheduler_detail::quantile_sorted(sample, 0.75);
    }
    return rows;
}

} // namespace co2cast
