#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "co2cast/error.hpp"
#include "co2cast/rng.hpp"
#include "co2cast/series.hpp"
#include "co2cast/spline.hpp"
#include "co2cast/stats.hpp"

namespace co2cast {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Strict local extrema; a plateau contributes its midpoint (rounded half down).
struct Extrema {
    std::vector<std::size_t> minima_idx;
    std::vector<double> minima_val;
    std::vector<std::size_t> maxima_idx;
    std::vector<double> maxima_val;
};

struct EnvelopePair {
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Ordered intrinsic mode functions (fastest oscillation first) plus residual.
struct ImfSet {
    std::vector<std::vector<double>> imfs;
    std::vector<double> residual;

    std::vector<double> reconstruct() const {
        std::vector<double> out = residual;
        for (const auto& imf : imfs) {
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += imf[i];
        }
        return out;
    }
};

struct EemdConfig {
    std::size_t ensemble_size = 100; ///< M
    double noise_amplitude = 0.2;    ///< e, fraction of the input standard deviation
    /// Sift cap. Components on noise-like series need up to ~100 sifts before
    /// both IMF conditions hold, so the cap sits well above that.
    std::size_t max_sifts = 200;
    /// Cauchy-type stagnation threshold, consulted only in the back half of
    /// the sift budget; the IMF conditions themselves are the primary stop.
    double sift_sd_threshold = 0.2;
    std::uint64_t seed = 0;

    void validate() const {
        if (ensemble_size < 1 || noise_amplitude < 0.0 || max_sifts < 1) {
            raise(errc::config_error, "invalid EEMD configuration");
        }
    }
};

/// IMFs regrouped at the first partial sum whose mean departs from zero:
/// high = IMF1..IMF(n-1), low = IMFn..IMFm, trend = residual.
struct FineToCoarseSplit {
    std::vector<double> high_freq;
    std::vector<double> low_freq;
    std::vector<double> trend;
    std::size_t split_index = 0; ///< the significant n (m + 1 when none is)
};

// ---------------------------------------------------------------------------
// Extrema and envelopes
// ---------------------------------------------------------------------------

inline Extrema find_extrema(const std::vector<double>& x) {
    Extrema out;
    const std::size_t n = x.size();
    if (n < 3) return out;

    // Collapse equal-value runs so plateaus act as single candidate points.
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[j + 1] == x[i]) ++j;
        runs.emplace_back(i, j);
        i = j + 1;
    }
    for (std::size_t r = 1; r + 1 < runs.size(); ++r) {
        const double prev = x[runs[r - 1].first];
        const double cur = x[runs[r].first];
        const double next = x[runs[r + 1].first];
        const std::size_t mid = (runs[r].first + runs[r].second) / 2;
        if (cur > prev && cur > next) {
            out.maxima_idx.push_back(mid);
            out.maxima_val.push_back(cur);
        } else if (cur < prev && cur < next) {
            out.minima_idx.push_back(mid);
            out.minima_val.push_back(cur);
        }
    }
    return out;
}

inline std::size_t count_zero_crossings(const std::vector<double>& x) {
    int last_sign = 0;
    std::size_t count = 0;
    for (double v : x) {
        const int s = (v > 0.0) - (v < 0.0);
        if (s == 0) continue;
        if (last_sign != 0 && s != last_sign) ++count;
        last_sign = s;
    }
    return count;
}

namespace detail {

struct Knots {
    std::vector<double> t;
    std::vector<double> v;

    void add(double tt, double vv) {
        t.push_back(tt);
        v.push_back(vv);
    }
};

/// Least-squares slope of an extrema family over time. Mirrored knot values
/// follow this slope so envelopes keep tracking a trending signal past the
/// ends instead of flattening (zero for stationary families, so symmetric
/// signals are unaffected).
inline double family_slope(const std::vector<std::size_t>& idx, const std::vector<double>& val) {
    const std::size_t m = idx.size();
    if (m < 2) return 0.0;
    double mean_t = 0.0, mean_v = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        mean_t += static_cast<double>(idx[k]);
        mean_v += val[k];
    }
    mean_t /= static_cast<double>(m);
    mean_v /= static_cast<double>(m);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double dt = static_cast<double>(idx[k]) - mean_t;
        num += dt * (val[k] - mean_v);
        den += dt * dt;
    }
    return den > 0.0 ? num / den : 0.0;
}

/// Mirror up to `count` knots from (idx, val) across `pivot`, walking outward
/// from position `from`. Values are shifted along the family slope to the
/// reflected position.
inline void reflect_knots(Knots& out, const std::vector<std::size_t>& idx,
                          const std::vector<double>& val, double slope, double pivot,
                          std::size_t from, std::size_t count, bool left) {
    for (std::size_t k = 0; k < count && from + k < idx.size(); ++k) {
        const std::size_t at = left ? from + k : idx.size() - 1 - from - k;
        const double t_new = 2.0 * pivot - static_cast<double>(idx[at]);
        out.add(t_new, val[at] + slope * (t_new - static_cast<double>(idx[at])));
    }
}

/// Boundary extension for one series end. The pivot is the first extremum
/// unless the boundary sample protrudes past the first opposite extremum, in
/// which case the reflection pivots at the series end and the endpoint joins
/// the opposite envelope as a knot. Falls back to an endpoint pivot whenever
/// a reflection fails to reach past the boundary.
inline void extend_one_end(const std::vector<double>& x, const Extrema& ex, bool left,
                           double max_slope, double min_slope, Knots& upper_ext, Knots& lower_ext) {
    const double boundary_t = left ? 0.0 : static_cast<double>(x.size() - 1);
    const double boundary_v = left ? x.front() : x.back();
    const std::size_t last_max = ex.maxima_idx.size() - 1;
    const std::size_t last_min = ex.minima_idx.size() - 1;
    const double tmax = static_cast<double>(left ? ex.maxima_idx.front() : ex.maxima_idx[last_max]);
    const double tmin = static_cast<double>(left ? ex.minima_idx.front() : ex.minima_idx[last_min]);
    const double vmax = left ? ex.maxima_val.front() : ex.maxima_val[last_max];
    const double vmin = left ? ex.minima_val.front() : ex.minima_val[last_min];
    const bool max_nearest = left ? tmax < tmin : tmax > tmin;

    double pivot;
    bool endpoint_is_min = false, endpoint_is_max = false;
    if (max_nearest) {
        if (boundary_v <= vmin) {
            pivot = boundary_t;
            endpoint_is_min = true; // start dips below the first minimum
        } else {
            pivot = tmax;
        }
    } else {
        if (boundary_v >= vmax) {
            pivot = boundary_t;
            endpoint_is_max = true;
        } else {
            pivot = tmin;
        }
    }

    auto covers = [&](const Knots& k) {
        for (double tt : k.t) {
            if (left ? tt <= 0.0 : tt >= static_cast<double>(x.size() - 1)) return true;
        }
        return false;
    };

    for (int attempt = 0; attempt < 2; ++attempt) {
        Knots up, lo;
        const bool pivot_is_extremum = pivot != boundary_t;
        // Skip the pivot extremum itself when reflecting its own family.
        const std::size_t max_from = (pivot_is_extremum && max_nearest) ? 1 : 0;
        const std::size_t min_from = (pivot_is_extremum && !max_nearest) ? 1 : 0;
        reflect_knots(up, ex.maxima_idx, ex.maxima_val, max_slope, pivot, max_from, 2, left);
        reflect_knots(lo, ex.minima_idx, ex.minima_val, min_slope, pivot, min_from, 2, left);
        if (endpoint_is_min) lo.add(boundary_t, boundary_v);
        if (endpoint_is_max) up.add(boundary_t, boundary_v);
        if (covers(up) && covers(lo)) {
            upper_ext = std::move(up);
            lower_ext = std::move(lo);
            return;
        }
        // Reflection around an interior pivot fell short of the boundary;
        // retry pivoting at the series end.
        pivot = boundary_t;
        endpoint_is_min = max_nearest && boundary_v <= vmin;
        endpoint_is_max = !max_nearest && boundary_v >= vmax;
    }
    // Final fallback: plain mirror about the endpoint.
    Knots up, lo;
    reflect_knots(up, ex.maxima_idx, ex.maxima_val, max_slope, boundary_t, 0, 2, left);
    reflect_knots(lo, ex.minima_idx, ex.minima_val, min_slope, boundary_t, 0, 2, left);
    upper_ext = std::move(up);
    lower_ext = std::move(lo);
}

/// Assemble strictly increasing spline knots: left extension, interior
/// extrema, right extension. Duplicate positions keep the first value.
inline std::vector<double> spline_envelope(const Knots& left_ext, const std::vector<std::size_t>& idx,
                                           const std::vector<double>& val, const Knots& right_ext,
                                           std::size_t n) {
    std::vector<std::pair<double, double>> knots;
    knots.reserve(left_ext.t.size() + idx.size() + right_ext.t.size());
    for (std::size_t k = 0; k < left_ext.t.size(); ++k) knots.emplace_back(left_ext.t[k], left_ext.v[k]);
    for (std::size_t k = 0; k < idx.size(); ++k) knots.emplace_back(static_cast<double>(idx[k]), val[k]);
    for (std::size_t k = 0; k < right_ext.t.size(); ++k) knots.emplace_back(right_ext.t[k], right_ext.v[k]);
    std::sort(knots.begin(), knots.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> xs, ys;
    xs.reserve(knots.size());
    ys.reserve(knots.size());
    for (const auto& [tt, vv] : knots) {
        if (!xs.empty() && tt <= xs.back()) continue;
        xs.push_back(tt);
        ys.push_back(vv);
    }

    NaturalCubicSpline spline(std::move(xs), std::move(ys));
    std::vector<double> env(n);
    for (std::size_t t = 0; t < n; ++t) env[t] = spline(static_cast<double>(t));
    return env;
}

} // namespace detail

inline EnvelopePair build_envelopes(const std::vector<double>& x, const Extrema& extrema) {
    if (extrema.maxima_idx.size() < 2 || extrema.minima_idx.size() < 2) {
        raise(errc::too_few_extrema, "envelopes need >= 2 maxima and >= 2 minima");
    }
    const double max_slope = detail::family_slope(extrema.maxima_idx, extrema.maxima_val);
    const double min_slope = detail::family_slope(extrema.minima_idx, extrema.minima_val);
    detail::Knots up_left, lo_left, up_right, lo_right;
    detail::extend_one_end(x, extrema, true, max_slope, min_slope, up_left, lo_left);
    detail::extend_one_end(x, extrema, false, max_slope, min_slope, up_right, lo_right);
    EnvelopePair env;
    env.upper = detail::spline_envelope(up_left, extrema.maxima_idx, extrema.maxima_val, up_right, x.size());
    env.lower = detail::spline_envelope(lo_left, extrema.minima_idx, extrema.minima_val, lo_right, x.size());
    return env;
}

// ---------------------------------------------------------------------------
// IMF conditions and sifting
// ---------------------------------------------------------------------------

/// True iff extrema and zero-crossing counts differ by at most one and the
/// envelope mean stays below tol_factor x component standard deviation.
inline bool imf_check(const std::vector<double>& component, double tol_factor = 0.05) {
    const Extrema ex = find_extrema(component);
    if (ex.maxima_idx.size() < 2 || ex.minima_idx.size() < 2) return false;
    const std::size_t n_extrema = ex.maxima_idx.size() + ex.minima_idx.size();
    const std::size_t n_crossings = count_zero_crossings(component);
    const std::size_t diff = n_extrema > n_crossings ? n_extrema - n_crossings : n_crossings - n_extrema;
    if (diff > 1) return false;

    const EnvelopePair env = build_envelopes(component, ex);
    double max_mean = 0.0;
    for (std::size_t t = 0; t < component.size(); ++t) {
        max_mean = std::max(max_mean, std::abs(0.5 * (env.lower[t] + env.upper[t])));
    }
    return max_mean <= tol_factor * stddev_of(component);
}

namespace detail {

inline bool has_enough_extrema(const std::vector<double>& x) {
    const Extrema ex = find_extrema(x);
    return ex.maxima_idx.size() >= 2 && ex.minima_idx.size() >= 2;
}

struct SiftOutcome {
    std::vector<double> component;
    /// False when no iterate passed the IMF conditions: the candidate lost
    /// its extrema mid-sift, stagnated (Cauchy SD below threshold late in
    /// the budget), or ran out of sifts. Such candidates are not IMFs.
    bool valid = false;
};

/// One IMF via repeated envelope-mean subtraction. Only a candidate that
/// passes both IMF conditions is emitted, so every extracted IMF is valid by
/// construction.
inline SiftOutcome sift_one_imf(std::vector<double> h, const EemdConfig& config) {
    SiftOutcome out;
    for (std::size_t sift = 0; sift < config.max_sifts; ++sift) {
        const Extrema ex = find_extrema(h);
        if (ex.maxima_idx.size() < 2 || ex.minima_idx.size() < 2) return out; // degenerated
        const EnvelopePair env = build_envelopes(h, ex);
        double change = 0.0, scale = 0.0;
        for (std::size_t t = 0; t < h.size(); ++t) {
            const double mean = 0.5 * (env.lower[t] + env.upper[t]);
            change += mean * mean;
            scale += h[t] * h[t];
            h[t] -= mean;
        }
        if (imf_check(h)) {
            out.component = std::move(h);
            out.valid = true;
            return out;
        }
        if (sift >= config.max_sifts / 2 && scale > 0.0 &&
            change / scale < config.sift_sd_threshold) {
            return out; // stagnated without reaching the IMF conditions
        }
    }
    return out;
}

} // namespace detail

/// Empirical mode decomposition. Extraction stops when the residual is
/// monotonic, runs out of extrema, or sifting yields no oscillating
/// component; the IMFs plus residual reconstruct the input exactly by
/// construction.
inline ImfSet emd(const std::vector<double>& values, const EemdConfig& config = {}) {
    if (values.size() < 8) raise(errc::series_too_short, "EMD needs length >= 8");
    ImfSet set;
    set.residual = values;
    const std::size_t max_imfs = 64; // safety stop, never reached on real data
    while (set.imfs.size() < max_imfs && detail::has_enough_extrema(set.residual)) {
        detail::SiftOutcome sifted = detail::sift_one_imf(set.residual, config);
        if (!sifted.valid) break; // oscillation died mid-sift; keep it in the residual
        for (std::size_t t = 0; t < set.residual.size(); ++t) set.residual[t] -= sifted.component[t];
        set.imfs.push_back(std::move(sifted.component));
    }
    return set;
}

inline ImfSet emd(const HourlySeries& series, const EemdConfig& config = {}) {
    return emd(series.values, config);
}

/// Ensemble EMD per the white-noise recipe: decompose M noise-perturbed
/// copies and average corresponding IMFs (zero-padding shorter IMF lists).
/// Deterministic for identical (input, config).
inline ImfSet eemd(const std::vector<double>& values, const EemdConfig& config) {
    config.validate();
    if (values.size() < 8) raise(errc::series_too_short, "EEMD needs length >= 8");
    if (config.noise_amplitude == 0.0 || config.ensemble_size == 1) {
        // Degenerate ensembles reduce to a single EMD pass (plus one noise
        // draw when M == 1 and e > 0).
        if (config.noise_amplitude == 0.0) return emd(values, config);
        Rng rng(derive_stream(config.seed, "eemd", 0));
        const double noise_std = config.noise_amplitude * stddev_of(values);
        std::vector<double> noisy(values.size());
        for (std::size_t t = 0; t < values.size(); ++t) {
            noisy[t] = values[t] + noise_std * rng.next_gaussian();
        }
        return emd(noisy, config);
    }

    const std::size_t n = values.size();
    const double noise_std = config.noise_amplitude * stddev_of(values);
    std::vector<std::vector<double>> imf_sums;
    std::vector<double> residual_sum(n, 0.0);
    std::vector<double> noisy(n);
    for (std::size_t run = 0; run < config.ensemble_size; ++run) {
        Rng rng(derive_stream(config.seed, "eemd", run));
        for (std::size_t t = 0; t < n; ++t) noisy[t] = values[t] + noise_std * rng.next_gaussian();
        ImfSet member = emd(noisy, config);
        while (imf_sums.size() < member.imfs.size()) imf_sums.emplace_back(n, 0.0);
        for (std::size_t k = 0; k < member.imfs.size(); ++k) {
            for (std::size_t t = 0; t < n; ++t) imf_sums[k][t] += member.imfs[k][t];
        }
        for (std::size_t t = 0; t < n; ++t) residual_sum[t] += member.residual[t];
    }

    const double inv_m = 1.0 / static_cast<double>(config.ensemble_size);
    ImfSet set;
    set.imfs.resize(imf_sums.size());
    for (std::size_t k = 0; k < imf_sums.size(); ++k) {
        set.imfs[k].resize(n);
        for (std::size_t t = 0; t < n; ++t) set.imfs[k][t] = imf_sums[k][t] * inv_m;
    }
    set.residual.resize(n);
    for (std::size_t t = 0; t < n; ++t) set.residual[t] = residual_sum[t] * inv_m;
    return set;
}

inline ImfSet eemd(const HourlySeries& series, const EemdConfig& config) {
    return eemd(series.values, config);
}

// ---------------------------------------------------------------------------
// Fine-to-coarse regrouping
// ---------------------------------------------------------------------------

/// Splits IMFs into high/low frequency groups at the smallest n whose
/// partial sum IMF1+..+IMFn has mean significantly nonzero (one-sample
/// t-test, alpha = 0.05). No significant n: everything is high frequency.
inline FineToCoarseSplit fine_to_coarse(const ImfSet& set, double alpha = 0.05) {
    if (set.imfs.empty()) raise(errc::no_imfs, "fine-to-coarse needs at least one IMF");
    const std::size_t m = set.imfs.size();
    const std::size_t n = set.residual.size();

    std::vector<double> partial(n, 0.0);
    std::size_t split = m + 1;
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t t = 0; t < n; ++t) partial[t] += set.imfs[k][t];
        if (t_test_mean_zero(partial) < alpha) {
            split = k + 1; // 1-based index of the significant partial sum
            break;
        }
    }

    FineToCoarseSplit out;
    out.split_index = split;
    out.high_freq.assign(n, 0.0);
    out.low_freq.assign(n, 0.0);
    out.trend = set.residual;
    for (std::size_t k = 0; k < m; ++k) {
        auto& target = (k + 1 < split) ? out.high_freq : out.low_freq;
        for (std::size_t t = 0; t < n; ++t) target[t] += set.imfs[k][t];
    }
    return out;
}

} // namespace co2cast
