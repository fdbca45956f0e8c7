#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "co2cast/arima.hpp"
#include "co2cast/error.hpp"
#include "co2cast/ffnn.hpp"
#include "co2cast/psf.hpp"
#include "co2cast/series.hpp"

namespace co2cast {

/// Multi-step strategy. Recursive fits once and feeds each one-step
/// prediction back as input; Dirrec appends the prediction and refits the
/// model class before predicting the next step.
enum class Strategy { recursive, dirrec };

inline const char* strategy_name(Strategy s) {
    return s == Strategy::recursive ? "recursive" : "dirrec";
}

struct Forecast {
    std::vector<double> values;
    std::size_t horizon = 0;
    hour_t origin = 0; ///< timestamp of the last training point
    bool convergence_warning = false;
};

/// ARIMA with orders re-selected from the data at fit time. Under Dirrec the
/// orders are selected once and only the coefficients are refitted per step.
struct AutoArimaSpec {
    int max_p = 5;
    int max_q = 5;
    int max_d = 2;
};

struct DpsfSpec {
    PsfSpec base;
};

using ModelSpec = std::variant<ArimaSpec, AutoArimaSpec, FfnnSpec, PsfSpec, DpsfSpec>;

inline std::string model_name(const ModelSpec& spec) {
    struct Visitor {
        std::string operator()(const ArimaSpec& s) const {
            return "arima(" + std::to_string(s.p) + "," + std::to_string(s.d) + "," +
                   std::to_string(s.q) + ")";
        }
        std::string operator()(const AutoArimaSpec&) const { return "arima(auto)"; }
        std::string operator()(const FfnnSpec& s) const {
            return "ffnn(" + std::to_string(s.lags) + "," + std::to_string(s.hidden) + ")";
        }
        std::string operator()(const PsfSpec& s) const {
            return "psf(" + std::to_string(s.window) + "," + std::to_string(s.clusters) + ")";
        }
        std::string operator()(const DpsfSpec& s) const {
            return "dpsf(" + std::to_string(s.base.window) + "," + std::to_string(s.base.clusters) + ")";
        }
    };
    return std::visit(Visitor{}, spec);
}

namespace models_detail {

/// One fitted-model forecast of `horizon` steps; bumps *fit_count once.
inline std::vector<double> single_fit_forecast(const ModelSpec& spec, const std::vector<double>& data,
                                               std::size_t horizon, int* fit_count, bool* warning) {
    if (fit_count) ++*fit_count;
    struct Visitor {
        const std::vector<double>& data;
        std::size_t horizon;
        bool* warning;

        std::vector<double> operator()(const ArimaSpec& s) const {
            return forecast_arima(fit_arima(data, s), horizon);
        }
        std::vector<double> operator()(const AutoArimaSpec& s) const {
            const ArimaSpec order = auto_arima_order(data, s.max_p, s.max_q, s.max_d);
            return forecast_arima(fit_arima(data, order), horizon);
        }
        std::vector<double> operator()(const FfnnSpec& s) const {
            return fit_forecast_ffnn_raw(data, s, horizon, warning);
        }
        std::vector<double> operator()(const PsfSpec& s) const {
            return fit_forecast_psf_raw(data, s, horizon);
        }
        std::vector<double> operator()(const DpsfSpec& s) const {
            return forecast_dpsf_raw(data, s.base, horizon);
        }
    };
    return std::visit(Visitor{data, horizon, warning}, spec);
}

} // namespace models_detail

/// Multi-step forecast dispatch. Recursive performs exactly one fit; Dirrec
/// performs exactly `horizon` fits (order selection for arima(auto) happens
/// once up front and is not a coefficient fit).
inline Forecast multi_step_forecast(const ModelSpec& spec, const HourlySeries& series,
                                    std::size_t horizon, Strategy strategy,
                                    int* fit_count = nullptr) {
    if (horizon < 1) raise(errc::out_of_range, "horizon must be >= 1");
    Forecast forecast;
    forecast.horizon = horizon;
    forecast.origin = series.hour_at(series.size() - 1);

    // Freeze auto-selected orders so Dirrec refits coefficients only.
    ModelSpec effective = spec;
    if (std::holds_alternative<AutoArimaSpec>(spec)) {
        const auto& a = std::get<AutoArimaSpec>(spec);
        effective = auto_arima_order(series.values, a.max_p, a.max_q, a.max_d);
    }

    bool warning = false;
    if (strategy == Strategy::recursive) {
        forecast.values =
            models_detail::single_fit_forecast(effective, series.values, horizon, fit_count, &warning);
    } else {
        std::vector<double> extended = series.values;
        forecast.values.reserve(horizon);
        for (std::size_t h = 0; h < horizon; ++h) {
            bool step_warning = false;
            const std::vector<double> step =
                models_detail::single_fit_forecast(effective, extended, 1, fit_count, &step_warning);
            warning = warning || step_warning;
            extended.push_back(step[0]);
            forecast.values.push_back(step[0]);
        }
    }
    forecast.convergence_warning = warning;
    return forecast;
}

/// Spec-level convenience wrappers.
inline Forecast fit_forecast_ffnn(const HourlySeries& series, const FfnnSpec& spec,
                                  std::size_t horizon, Strategy strategy = Strategy::recursive) {
    return multi_step_forecast(ModelSpec{spec}, series, horizon, strategy);
}

inline Forecast fit_forecast_psf(const HourlySeries& series, const PsfSpec& spec, std::size_t horizon) {
    return multi_step_forecast(ModelSpec{spec}, series, horizon, Strategy::recursive);
}

inline Forecast forecast_dpsf(const HourlySeries& series, const PsfSpec& spec, std::size_t horizon) {
    return multi_step_forecast(ModelSpec{DpsfSpec{spec}}, series, horizon, Strategy::recursive);
}

} // namespace co2cast
