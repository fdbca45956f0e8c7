#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "co2cast/composite.hpp"
#include "co2cast/error.hpp"
#include "co2cast/models.hpp"
#include "co2cast/series.hpp"
#include "co2cast/stats.hpp"

namespace co2cast {

/// A composite method bound to its configuration.
struct CompositeSpec {
    MethodId id = MethodId::method1;
    ComponentAssignment assignment = auto_assignment();
    EemdConfig eemd_config;
};

/// Pseudo-forecaster that returns the realized future; usable only where the
/// evaluation harness can hand it the truth (benchmarks, scheduling studies).
struct PerfectForesightSpec {};

using ForecastMethod = std::variant<ModelSpec, CompositeSpec, PerfectForesightSpec>;

struct NamedMethod {
    std::string name;
    ForecastMethod method;
    Strategy strategy = Strategy::recursive;
};

/// Forecast `horizon` steps past the end of `train`. `truth` (the realized
/// continuation) is consulted only by perfect foresight.
inline Forecast run_method(const NamedMethod& method, const HourlySeries& train, std::size_t horizon,
                           const std::vector<double>* truth = nullptr, int* fit_count = nullptr) {
    struct Visitor {
        const NamedMethod& method;
        const HourlySeries& train;
        std::size_t horizon;
        const std::vector<double>* truth;
        int* fit_count;

        Forecast operator()(const ModelSpec& spec) const {
            return multi_step_forecast(spec, train, horizon, method.strategy, fit_count);
        }
        Forecast operator()(const CompositeSpec& spec) const {
            if (spec.id == MethodId::method1) {
                return forecast_method1(train, horizon, spec.assignment, method.strategy, fit_count);
            }
            return forecast_method2(train, horizon, spec.assignment, method.strategy, spec.eemd_config,
                                    fit_count);
        }
        Forecast operator()(const PerfectForesightSpec&) const {
            if (truth == nullptr || truth->size() < horizon) {
                raise(errc::config_error, "perfect foresight needs realized values");
            }
            Forecast f;
            f.horizon = horizon;
            f.origin = train.hour_at(train.size() - 1);
            f.values.assign(truth->begin(), truth->begin() + static_cast<std::ptrdiff_t>(horizon));
            return f;
        }
    };
    return std::visit(Visitor{method, train, horizon, truth, fit_count}, method.method);
}

// ---------------------------------------------------------------------------
// Monte-Carlo benchmark
// ---------------------------------------------------------------------------

struct MethodBenchmark {
    std::string name;
    std::vector<std::optional<ErrorReport>> per_patch; ///< nullopt = failed patch
    ErrorReport mean;                                  ///< arithmetic mean over successes
    std::size_t failures = 0;
};

struct BenchmarkReport {
    std::vector<MethodBenchmark> methods;
    std::size_t n_patches = 0;
    std::size_t patch_len = 0; ///< train + horizon
    std::size_t horizon = 0;
    std::uint64_t seed = 0;
};

namespace benchmark_detail {

inline ErrorReport mean_errors(const std::vector<std::optional<ErrorReport>>& per_patch) {
    ErrorReport mean;
    double rmse = 0.0, mae = 0.0, mape = 0.0;
    std::size_t n = 0, n_mape = 0;
    for (const auto& report : per_patch) {
        if (!report) continue;
        rmse += report->rmse;
        mae += report->mae;
        ++n;
        if (report->mape) {
            mape += *report->mape;
            ++n_mape;
        }
        mean.n = report->n;
    }
    if (n > 0) {
        mean.rmse = rmse / static_cast<double>(n);
        mean.mae = mae / static_cast<double>(n);
    }
    if (n_mape > 0) mean.mape = mape / static_cast<double>(n_mape);
    return mean;
}

} // namespace benchmark_detail

/// Evaluate every method on every Monte-Carlo patch (train on the first
/// patch_len - horizon samples, score on the last horizon). A method failure
/// on a patch is recorded and excluded from that method's mean.
inline BenchmarkReport run_benchmark(const HourlySeries& series, const std::vector<NamedMethod>& methods,
                                     std::size_t n_patches, std::size_t patch_len, std::size_t horizon,
                                     std::uint64_t seed) {
    if (horizon < 1 || patch_len <= horizon) raise(errc::out_of_range, "patch must exceed horizon");
    const std::size_t train_len = patch_len - horizon;
    const PatchSet patches = monte_carlo_patches(series, n_patches, train_len, horizon, seed);

    BenchmarkReport report;
    report.n_patches = n_patches;
    report.patch_len = patch_len;
    report.horizon = horizon;
    report.seed = seed;
    report.methods.reserve(methods.size());

    for (const NamedMethod& method : methods) {
        MethodBenchmark bench;
        bench.name = method.name;
        bench.per_patch.reserve(n_patches);
        for (const Patch& patch : patches.patches) {
            const HourlySeries window = slice(series, patch.start, patch_len);
            const auto [train, validation] = split_train_validation(window, train_len, horizon);
            std::optional<ErrorReport> entry;
            try {
                const Forecast f = run_method(method, train, horizon, &validation.values);
                entry = compute_errors(validation.values, f.values);
            } catch (const Error&) {
                ++bench.failures;
            }
            bench.per_patch.push_back(entry);
        }
        bench.mean = benchmark_detail::mean_errors(bench.per_patch);
        report.methods.push_back(std::move(bench));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Friedman rank test
// ---------------------------------------------------------------------------

struct FriedmanResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t k = 0; ///< treatments
    std::size_t b = 0; ///< blocks
};

/// Classic Friedman chi-square statistic with (k-1) degrees of freedom;
/// within-block ties get average ranks. treatments[i] holds treatment i's
/// value in every block.
inline FriedmanResult friedman_test(const std::vector<std::vector<double>>& treatments) {
    const std::size_t k = treatments.size();
    if (k < 2) raise(errc::degenerate_input, "need >= 2 treatments");
    const std::size_t b = treatments.front().size();
    if (b < 2) raise(errc::degenerate_input, "need >= 2 blocks");
    for (const auto& t : treatments) {
        if (t.size() != b) raise(errc::length_mismatch, "ragged treatment matrix");
    }

    std::vector<double> rank_sum(k, 0.0);
    std::vector<std::size_t> order(k);
    for (std::size_t block = 0; block < b; ++block) {
        for (std::size_t i = 0; i < k; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
            return treatments[a][block] < treatments[c][block];
        });
        std::size_t i = 0;
        while (i < k) {
            std::size_t j = i;
            while (j + 1 < k && treatments[order[j + 1]][block] == treatments[order[i]][block]) ++j;
            const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t t = i; t <= j; ++t) rank_sum[order[t]] += avg_rank;
            i = j + 1;
        }
    }

    const double kb = static_cast<double>(k);
    const double bb = static_cast<double>(b);
    double sum_sq = 0.0;
    for (double r : rank_sum) sum_sq += r * r;
    FriedmanResult result;
    result.k = k;
    result.b = b;
    result.statistic = 12.0 / (bb * kb * (kb + 1.0)) * sum_sq - 3.0 * bb * (kb + 1.0);
    if (result.statistic < 0.0 && result.statistic > -1e-9) result.statistic = 0.0;
    result.p_value = chi_squared_survival(result.statistic, kb - 1.0);
    return result;
}

// ---------------------------------------------------------------------------
// Horizon sweep and improvement table
// ---------------------------------------------------------------------------

struct HorizonSweepEntry {
    std::string method;
    std::size_t horizon = 0;
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> mape;
};

/// RMSE-by-horizon curves over a shared set of patch starts: patches are
/// drawn once for the largest horizon so every curve sees the same data.
/// Entries come back sorted by (method order, ascending horizon).
inline std::vector<HorizonSweepEntry> horizon_sweep(const HourlySeries& series,
                                                    const std::vector<NamedMethod>& methods,
                                                    std::vector<std::size_t> horizons,
                                                    std::size_t n_patches, std::size_t train_len,
                                                    std::uint64_t seed) {
    if (horizons.empty()) raise(errc::out_of_range, "need at least one horizon");
    std::sort(horizons.begin(), horizons.end());
    horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
    if (horizons.front() < 1) raise(errc::out_of_range, "horizons must be >= 1");
    const std::size_t max_h = horizons.back();
    const PatchSet patches = monte_carlo_patches(series, n_patches, train_len, max_h, seed);

    std::vector<HorizonSweepEntry> entries;
    for (const NamedMethod& method : methods) {
        for (std::size_t h : horizons) {
            std::vector<std::optional<ErrorReport>> per_patch;
            per_patch.reserve(n_patches);
            for (const Patch& patch : patches.patches) {
                const HourlySeries window = slice(series, patch.start, train_len + max_h);
                const auto [train, validation] = split_train_validation(window, train_len, max_h);
                std::optional<ErrorReport> entry;
                try {
                    const std::vector<double> truth(validation.values.begin(),
                                                    validation.values.begin() + static_cast<std::ptrdiff_t>(h));
                    const Forecast f = run_method(method, train, h, &truth);
                    entry = compute_errors(truth, f.values);
                } catch (const Error&) {
                }
                per_patch.push_back(entry);
            }
            const ErrorReport mean = benchmark_detail::mean_errors(per_patch);
            entries.push_back(HorizonSweepEntry{method.name, h, mean.rmse, mean.mae, mean.mape});
        }
    }
    return entries;
}

struct ImprovementRow {
    std::string method;
    double rmse_pct = 0.0;
    double mae_pct = 0.0;
    std::optional<double> mape_pct;
};

/// Percentage improvement of every method against the named baseline:
/// (baseline - method) / baseline x 100 per metric. Negative = worse.
inline std::vector<ImprovementRow> improvement_table(const BenchmarkReport& report,
                                                     const std::string& baseline) {
    const MethodBenchmark* base = nullptr;
    for (const auto& m : report.methods) {
        if (m.name == baseline) {
            base = &m;
            break;
        }
    }
    if (base == nullptr) raise(errc::unknown_baseline, "'" + baseline + "' not in report");
    if (base->mean.rmse == 0.0 || base->mean.mae == 0.0) {
        raise(errc::zero_baseline, "baseline error is zero");
    }

    std::vector<ImprovementRow> rows;
    for (const auto& m : report.methods) {
        if (m.name == baseline) continue;
        ImprovementRow row;
        row.method = m.name;
        row.rmse_pct = (base->mean.rmse - m.mean.rmse) / base->mean.rmse * 100.0;
        row.mae_pct = (base->mean.mae - m.mean.mae) / base->mean.mae * 100.0;
        if (base->mean.mape && m.mean.mape && *base->mean.mape != 0.0) {
            row.mape_pct = (*base->mean.mape - *m.mean.mape) / *base->mean.mape * 100.0;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace co2cast
