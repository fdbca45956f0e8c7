#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "co2cast/classical.hpp"
#include "co2cast/emd.hpp"
#include "co2cast/error.hpp"
#include "co2cast/models.hpp"
#include "co2cast/series.hpp"

namespace co2cast {

enum class MethodId { method1, method2 };

inline const char* method_name(MethodId id) {
    return id == MethodId::method1 ? "method1" : "method2";
}

/// Roles are positional: method 1 uses (seasonal, trend, random), method 2
/// uses (high-frequency, low-frequency, trend).
inline std::array<const char*, 3> component_roles(MethodId id) {
    if (id == MethodId::method1) return {"seasonal", "trend", "random"};
    return {"high", "low", "trend"};
}

/// One model spec per decomposed component.
struct ComponentAssignment {
    std::array<ModelSpec, 3> models;
};

/// Component models that reproduced the strongest cross-validated accuracy
/// on the reference workflow: the seasonal component goes to an FFNN, every
/// other component to an ARIMA model.
inline ComponentAssignment france_preset(MethodId id) {
    ComponentAssignment a;
    if (id == MethodId::method1) {
        a.models = {ModelSpec{FfnnSpec{28, 14}}, ModelSpec{ArimaSpec{1, 1, 0}},
                    ModelSpec{ArimaSpec{3, 0, 1}}};
    } else {
        a.models = {ModelSpec{ArimaSpec{2, 0, 3}}, ModelSpec{ArimaSpec{1, 0, 0}},
                    ModelSpec{ArimaSpec{0, 2, 0}}};
    }
    return a;
}

/// Orders re-selected from each component series at fit time.
inline ComponentAssignment auto_assignment() {
    return ComponentAssignment{
        {ModelSpec{AutoArimaSpec{}}, ModelSpec{AutoArimaSpec{}}, ModelSpec{AutoArimaSpec{}}}};
}

namespace composite_detail {

/// Decompose into the three method components, full length.
inline std::array<std::vector<double>, 3> components_of(MethodId id, const std::vector<double>& values,
                                                        const EemdConfig& eemd_config) {
    if (id == MethodId::method1) {
        const std::size_t period = detect_period(values);
        const ClassicalDecomposition d = decompose_classical(values, period);
        return {d.seasonal, d.trend, d.random};
    }
    const ImfSet set = eemd(values, eemd_config);
    if (set.imfs.empty()) {
        // No oscillatory content (e.g. constant input): everything is trend.
        const std::vector<double> zero(values.size(), 0.0);
        return {zero, zero, set.residual};
    }
    const FineToCoarseSplit split = fine_to_coarse(set);
    return {split.high_freq, split.low_freq, split.trend};
}

inline Forecast forecast_components(MethodId id, const HourlySeries& series, std::size_t horizon,
                                    const ComponentAssignment& assignment, Strategy strategy,
                                    const EemdConfig& eemd_config, int* fit_count) {
    const auto components = components_of(id, series.values, eemd_config);
    Forecast total;
    total.horizon = horizon;
    total.origin = series.hour_at(series.size() - 1);
    total.values.assign(horizon, 0.0);
    for (std::size_t c = 0; c < 3; ++c) {
        const HourlySeries component{series.start_hour, components[c]};
        const Forecast part = multi_step_forecast(assignment.models[c], component, horizon, strategy, fit_count);
        for (std::size_t h = 0; h < horizon; ++h) total.values[h] += part.values[h];
        total.convergence_warning = total.convergence_warning || part.convergence_warning;
    }
    return total;
}

} // namespace composite_detail

/// Method 1: classical decomposition, per-component forecasts, pointwise sum.
inline Forecast forecast_method1(const HourlySeries& series, std::size_t horizon,
                                 const ComponentAssignment& assignment,
                                 Strategy strategy = Strategy::recursive, int* fit_count = nullptr) {
    return composite_detail::forecast_components(MethodId::method1, series, horizon, assignment,
                                                 strategy, EemdConfig{}, fit_count);
}

/// Method 2: EEMD, fine-to-coarse regrouping, per-component forecasts, sum.
inline Forecast forecast_method2(const HourlySeries& series, std::size_t horizon,
                                 const ComponentAssignment& assignment,
                                 Strategy strategy = Strategy::recursive,
                                 const EemdConfig& eemd_config = EemdConfig{},
                                 int* fit_count = nullptr) {
    if (series.size() < 200) raise(errc::series_too_short, "method 2 needs length >= 200");
    return composite_detail::forecast_components(MethodId::method2, series, horizon, assignment,
                                                 strategy, eemd_config, fit_count);
}

/// Cross-validated component-model selection over Monte-Carlo patches: each
/// patch is decomposed whole, candidates forecast the component's training
/// part `horizon` steps, and the candidate with the lowest mean RMSE against
/// the component's validation part wins (MAE breaks ties, then list order).
inline ComponentAssignment select_component_models(const HourlySeries& series, MethodId method,
                                                   const std::vector<ModelSpec>& candidates,
                                                   std::size_t n_patches, std::size_t patch_len,
                                                   std::size_t horizon, std::uint64_t seed,
                                                   const EemdConfig& eemd_config = EemdConfig{}) {
    if (candidates.empty()) raise(errc::config_error, "need at least one candidate model");
    if (patch_len + horizon > series.size()) {
        raise(errc::series_too_short, "series shorter than one selection patch");
    }
    const PatchSet patches = monte_carlo_patches(series, n_patches, patch_len, horizon, seed);

    const std::size_t n_candidates = candidates.size();
    std::array<std::vector<double>, 3> rmse_sum;
    std::array<std::vector<double>, 3> mae_sum;
    for (std::size_t c = 0; c < 3; ++c) {
        rmse_sum[c].assign(n_candidates, 0.0);
        mae_sum[c].assign(n_candidates, 0.0);
    }

    for (const Patch& patch : patches.patches) {
        const HourlySeries window = slice(series, patch.start, patch.train_length + patch.horizon);
        const auto components = composite_detail::components_of(method, window.values, eemd_config);
        for (std::size_t c = 0; c < 3; ++c) {
            const HourlySeries train{window.start_hour,
                                     {components[c].begin(),
                                      components[c].begin() + static_cast<std::ptrdiff_t>(patch.train_length)}};
            const std::vector<double> target(
                components[c].begin() + static_cast<std::ptrdiff_t>(patch.train_length),
                components[c].end());
            for (std::size_t m = 0; m < n_candidates; ++m) {
                double rmse = std::numeric_limits<double>::infinity();
                double mae = std::numeric_limits<double>::infinity();
                try {
                    const Forecast f =
                        multi_step_forecast(candidates[m], train, patch.horizon, Strategy::recursive);
                    const ErrorReport report = compute_errors(target, f.values);
                    rmse = report.rmse;
                    mae = report.mae;
                } catch (const Error&) {
                    // candidate unusable on this patch; infinity keeps it from winning
                }
                rmse_sum[c][m] += rmse;
                mae_sum[c][m] += mae;
            }
        }
    }

    ComponentAssignment assignment;
    for (std::size_t c = 0; c < 3; ++c) {
        std::size_t best = 0;
        for (std::size_t m = 1; m < n_candidates; ++m) {
            if (rmse_sum[c][m] < rmse_sum[c][best] ||
                (rmse_sum[c][m] == rmse_sum[c][best] && mae_sum[c][m] < mae_sum[c][best])) {
                best = m;
            }
        }
        assignment.models[c] = candidates[best];
    }
    return assignment;
}

} // namespace co2cast
