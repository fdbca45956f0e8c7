#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "co2cast/error.hpp"
#include "co2cast/series.hpp"

namespace co2cast {

/// Additive seasonal / trend / random split with period P. The seasonal
/// component is exactly P-periodic and sums to zero over one period; the
/// three components sum back to the input by construction.
struct ClassicalDecomposition {
    std::vector<double> seasonal;
    std::vector<double> trend;
    std::vector<double> random;
    std::size_t period = 0;
    // Index range where the centered moving average is natively defined;
    // trend values outside it are linear extrapolations.
    std::size_t interior_begin = 0;
    std::size_t interior_end = 0;
};

/// Dominant cycle length from the periodogram, searched over integer
/// periods in [2, length/2].
inline std::size_t detect_period(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 6) raise(errc::series_too_short, "period detection needs length >= 6");
    const double mean = mean_of(values);
    double energy = 0.0;
    for (double v : values) energy += (v - mean) * (v - mean);
    if (energy <= 1e-18 * static_cast<double>(n)) {
        raise(errc::no_dominant_period, "constant series has no non-DC spectral energy");
    }

    std::size_t best_period = 0;
    double best_power = -1.0;
    const double two_pi = 6.283185307179586476925286766559;
    for (std::size_t period = 2; period <= n / 2; ++period) {
        const double w = two_pi / static_cast<double>(period);
        // Goertzel recurrence for the DFT bin at frequency 1/period.
        const double coeff = 2.0 * std::cos(w);
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            s0 = (values[t] - mean) + coeff * s1 - s2;
            s2 = s1;
            s1 = s0;
        }
        const double power = s1 * s1 + s2 * s2 - coeff * s1 * s2;
        if (power > best_power) {
            best_power = power;
            best_period = period;
        }
    }
    if (best_power <= 1e-12 * energy) {
        raise(errc::no_dominant_period, "flat spectrum");
    }
    return best_period;
}

inline std::size_t detect_period(const HourlySeries& series) { return detect_period(series.values); }

namespace detail {

/// Centered moving average of window P; the standard 2xP construction for
/// even P. Entries outside the natively defined interior are NaN.
inline std::vector<double> centered_moving_average(const std::vector<double>& x, std::size_t period) {
    const std::size_t n = x.size();
    std::vector<double> trend(n, std::numeric_limits<double>::quiet_NaN());
    if (period % 2 == 1) {
        const std::size_t half = period / 2;
        for (std::size_t t = half; t + half < n; ++t) {
            double s = 0.0;
            for (std::size_t k = t - half; k <= t + half; ++k) s += x[k];
            trend[t] = s / static_cast<double>(period);
        }
    } else {
        const std::size_t half = period / 2;
        for (std::size_t t = half; t + half < n; ++t) {
            double s = 0.5 * x[t - half] + 0.5 * x[t + half];
            for (std::size_t k = t - half + 1; k + 1 <= t + half; ++k) s += x[k];
            trend[t] = s / static_cast<double>(period);
        }
    }
    return trend;
}

/// Fill NaN edges by extending the line through the two nearest valid points.
inline void extrapolate_edges(std::vector<double>& trend) {
    const std::size_t n = trend.size();
    std::size_t first = 0;
    while (first < n && std::isnan(trend[first])) ++first;
    std::size_t last = n;
    while (last > 0 && std::isnan(trend[last - 1])) --last;
    if (first >= last) raise(errc::series_too_short, "no interior trend points");
    --last;
    const double left_slope = (last > first) ? trend[first + 1] - trend[first] : 0.0;
    const double right_slope = (last > first) ? trend[last] - trend[last - 1] : 0.0;
    for (std::size_t i = first; i-- > 0;) trend[i] = trend[i + 1] - left_slope;
    for (std::size_t i = last + 1; i < n; ++i) trend[i] = trend[i - 1] + right_slope;
}

} // namespace detail

/// Four-step additive decomposition: centered-MA trend, phase-mean seasonal
/// indices (centered to zero sum), random as the remainder.
inline ClassicalDecomposition decompose_classical(const std::vector<double>& values, std::size_t period) {
    const std::size_t n = values.size();
    if (period < 2) raise(errc::out_of_range, "period must be >= 2");
    if (n < 2 * period) raise(errc::series_too_short, "need length >= 2 x period");

    ClassicalDecomposition d;
    d.period = period;
    d.trend = detail::centered_moving_average(values, period);
    d.interior_begin = period / 2;
    d.interior_end = n - period / 2;
    detail::extrapolate_edges(d.trend);

    std::vector<double> detrended(n);
    for (std::size_t i = 0; i < n; ++i) detrended[i] = values[i] - d.trend[i];

    std::vector<double> phase_sum(period, 0.0);
    std::vector<std::size_t> phase_count(period, 0);
    for (std::size_t i = 0; i < n; ++i) {
        phase_sum[i % period] += detrended[i];
        ++phase_count[i % period];
    }
    std::vector<double> index(period);
    double level = 0.0;
    for (std::size_t j = 0; j < period; ++j) {
        index[j] = phase_sum[j] / static_cast<double>(phase_count[j]);
        level += index[j];
    }
    level /= static_cast<double>(period);
    for (std::size_t j = 0; j < period; ++j) index[j] -= level;

    d.seasonal.resize(n);
    d.random.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.seasonal[i] = index[i % period];
        d.random[i] = values[i] - d.trend[i] - d.seasonal[i];
    }
    return d;
}

inline ClassicalDecomposition decompose_classical(const HourlySeries& series, std::size_t period) {
    return decompose_classical(series.values, period);
}

/// Pointwise sum of the three components.
inline std::vector<double> reconstruct_classical(const ClassicalDecomposition& d) {
    const std::size_t n = d.seasonal.size();
    if (d.trend.size() != n || d.random.size() != n) {
        raise(errc::length_mismatch, "component lengths differ");
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = d.seasonal[i] + d.trend[i] + d.random[i];
    return out;
}

} // namespace co2cast
