#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "co2cast/error.hpp"
#include "co2cast/series.hpp"

namespace co2cast {

struct ArimaSpec {
    int p = 0;
    int d = 0;
    int q = 0;

    bool operator==(const ArimaSpec&) const = default;
};

/// Fitted ARIMA model. Coefficients maximize the conditional Gaussian
/// likelihood of the d-times differenced series (CSS objective, analytic
/// Jacobian, Levenberg-Marquardt); AR roots are reflected into the unit
/// disc so the fitted process stays stationary.
struct ArimaFit {
    ArimaSpec spec;
    std::vector<double> ar_coeffs;
    std::vector<double> ma_coeffs;
    double intercept = 0.0; ///< mean of the differenced process; fixed 0 when d > 0
    double innovation_variance = 0.0;
    double log_likelihood = 0.0;
    std::size_t n_effective = 0;
    bool converged = true;

    // Training-tail state used by forecast_arima.
    std::vector<double> w_tail;     ///< last p differenced values (oldest first)
    std::vector<double> eps_tail;   ///< last q residuals (oldest first)
    std::vector<double> level_tail; ///< last value of each differencing stage 0..d-1
};

namespace arima_detail {

inline std::vector<double> difference(const std::vector<double>& x, int d) {
    std::vector<double> w = x;
    for (int k = 0; k < d; ++k) {
        for (std::size_t i = 0; i + 1 < w.size(); ++i) w[i] = w[i + 1] - w[i];
        w.pop_back();
    }
    return w;
}

/// Conditional-sum-of-squares evaluation at parameter vector
/// [mu?, phi_1..phi_p, theta_1..theta_q]. Residuals start at t = p with
/// earlier innovations fixed to zero; the sum runs from
/// max(condition, p) so model orders can share a comparison window.
/// With derivatives enabled, deriv[k][t] = d eps_t / d param_k and
/// gradient = d sum_sq / d params — exactly what the optimizer consumes.
struct CssEval {
    double sum_sq = 0.0;
    std::size_t n_terms = 0;
    std::vector<double> residuals;
    std::vector<std::vector<double>> deriv;
    std::vector<double> gradient;
};

inline CssEval css_eval(const std::vector<double>& w, int p, int q, bool with_mean,
                        const std::vector<double>& params, std::size_t condition,
                        bool want_derivatives) {
    const std::size_t n = w.size();
    const std::size_t npar = params.size();
    const std::size_t mu_off = with_mean ? 1 : 0;
    const double mu = with_mean ? params[0] : 0.0;
    const double* phi = params.data() + mu_off;
    const double* theta = params.data() + mu_off + p;
    const std::size_t start = std::max<std::size_t>(condition, static_cast<std::size_t>(p));

    CssEval eval;
    eval.residuals.assign(n, 0.0);
    if (want_derivatives) eval.deriv.assign(npar, std::vector<double>(n, 0.0));

    auto eps_defined = [&](std::size_t t, int j) {
        return t >= static_cast<std::size_t>(j + 1) &&
               t - 1 - static_cast<std::size_t>(j) >= static_cast<std::size_t>(p);
    };

    for (std::size_t t = static_cast<std::size_t>(p); t < n; ++t) {
        double eps = w[t] - mu;
        for (int i = 0; i < p; ++i) eps -= phi[i] * (w[t - 1 - static_cast<std::size_t>(i)] - mu);
        for (int j = 0; j < q; ++j) {
            if (eps_defined(t, j)) eps -= theta[j] * eval.residuals[t - 1 - static_cast<std::size_t>(j)];
        }
        eval.residuals[t] = eps;
        if (want_derivatives) {
            for (std::size_t k = 0; k < npar; ++k) {
                double g;
                if (with_mean && k == 0) {
                    g = -1.0;
                    for (int i = 0; i < p; ++i) g += phi[i];
                } else if (k < mu_off + static_cast<std::size_t>(p)) {
                    const auto i = static_cast<std::size_t>(k - mu_off);
                    g = -(w[t - 1 - i] - mu);
                } else {
                    const int j = static_cast<int>(k - mu_off - static_cast<std::size_t>(p));
                    g = eps_defined(t, j) ? -eval.residuals[t - 1 - static_cast<std::size_t>(j)] : 0.0;
                }
                for (int j = 0; j < q; ++j) {
                    if (eps_defined(t, j)) g -= theta[j] * eval.deriv[k][t - 1 - static_cast<std::size_t>(j)];
                }
                eval.deriv[k][t] = g;
            }
        }
        if (t >= start) eval.sum_sq += eps * eps;
    }
    eval.n_terms = n > start ? n - start : 0;
    if (want_derivatives) {
        eval.gradient.assign(npar, 0.0);
        for (std::size_t k = 0; k < npar; ++k) {
            double g = 0.0;
            for (std::size_t t = start; t < n; ++t) g += eval.deriv[k][t] * eval.residuals[t];
            eval.gradient[k] = 2.0 * g;
        }
    }
    return eval;
}

/// Reflect AR characteristic roots with modulus >= 1 into the unit disc and
/// rebuild the coefficients.
inline void enforce_stationarity(std::vector<double>& phi) {
    const int p = static_cast<int>(phi.size());
    if (p == 0) return;
    double mag_sum = 0.0;
    for (double c : phi) mag_sum += std::abs(c);
    if (mag_sum < 1.0) return; // sufficient condition, cheap exit

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) companion(0, i) = phi[static_cast<std::size_t>(i)];
    for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    Eigen::VectorXcd roots = solver.eigenvalues();

    const double limit = 1.0 - 1e-7;
    bool changed = false;
    for (int i = 0; i < p; ++i) {
        double mag = std::abs(roots(i));
        if (mag >= limit) {
            roots(i) /= mag * mag;            // reflect across the unit circle
            mag = std::abs(roots(i));
            if (mag >= limit) roots(i) *= limit / mag;
            changed = true;
        }
    }
    if (!changed) return;

    // Expand prod_i (lambda - r_i); phi_k = -coefficient of lambda^{p-k}.
    std::vector<std::complex<double>> poly(static_cast<std::size_t>(p) + 1, 0.0);
    poly[0] = 1.0;
    for (int i = 0; i < p; ++i) {
        for (int k = i + 1; k >= 1; --k) {
            poly[static_cast<std::size_t>(k)] =
                poly[static_cast<std::size_t>(k)] * 1.0 - roots(i) * poly[static_cast<std::size_t>(k - 1)];
        }
        // k = 0 term: multiplying by (lambda - r) leaves leading coeff at 1
    }
    for (int k = 1; k <= p; ++k) phi[static_cast<std::size_t>(k - 1)] = -poly[static_cast<std::size_t>(k)].real();
}

/// Reflect MA roots into the invertible region. Non-invertible theta would
/// let the conditional residual recursion shrink the CSS spuriously.
inline void enforce_invertibility(std::vector<double>& theta) {
    // 1 + sum theta_j z^j = 1 - sum (-theta_j) z^j, so reuse the AR machinery.
    for (double& t : theta) t = -t;
    enforce_stationarity(theta);
    for (double& t : theta) t = -t;
}

/// Largest characteristic-root modulus of 1 - sum(c_k z^k); 0 for empty c.
inline double max_root_modulus(const std::vector<double>& coeffs) {
    const int p = static_cast<int>(coeffs.size());
    if (p == 0) return 0.0;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) companion(0, i) = coeffs[static_cast<std::size_t>(i)];
    for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    double max_mod = 0.0;
    for (int i = 0; i < p; ++i) max_mod = std::max(max_mod, std::abs(solver.eigenvalues()(i)));
    return max_mod;
}

/// Hannan-Rissanen style initialization: long-AR residual proxies, then a
/// least-squares regression on lagged values and lagged residuals.
inline std::vector<double> initial_params(const std::vector<double>& w, int p, int q, bool with_mean) {
    const std::size_t n = w.size();
    const double mean = mean_of(w);
    const std::size_t mu_off = with_mean ? 1 : 0;
    std::vector<double> params(mu_off + static_cast<std::size_t>(p + q), 0.0);
    if (with_mean) params[0] = mean;
    if (p + q == 0) return params;

    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = w[i] - mean;

    std::vector<double> eps_hat(n, 0.0);
    int lar = 0;
    if (q > 0) {
        lar = std::min<int>(static_cast<int>(n) / 4, 10 + p + q);
        if (static_cast<std::size_t>(lar) + 4 < n) {
            const std::size_t rows = n - static_cast<std::size_t>(lar);
            Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), lar);
            Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
            for (std::size_t t = 0; t < rows; ++t) {
                y(static_cast<Eigen::Index>(t)) = z[t + static_cast<std::size_t>(lar)];
                for (int i = 0; i < lar; ++i) {
                    X(static_cast<Eigen::Index>(t), i) = z[t + static_cast<std::size_t>(lar - 1 - i)];
                }
            }
            Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
            for (std::size_t t = static_cast<std::size_t>(lar); t < n; ++t) {
                double e = z[t];
                for (int i = 0; i < lar; ++i) e -= beta(i) * z[t - 1 - static_cast<std::size_t>(i)];
                eps_hat[t] = e;
            }
        } else {
            lar = 0;
        }
    }

    const std::size_t lead = static_cast<std::size_t>(std::max(p, std::max(q, lar)));
    if (lead + 4 >= n) return params; // too short for the regression; zeros are safe
    const std::size_t rows = n - lead;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), p + q);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    for (std::size_t t = 0; t < rows; ++t) {
        const std::size_t at = t + lead;
        y(static_cast<Eigen::Index>(t)) = z[at];
        for (int i = 0; i < p; ++i) X(static_cast<Eigen::Index>(t), i) = z[at - 1 - static_cast<std::size_t>(i)];
        for (int j = 0; j < q; ++j) {
            X(static_cast<Eigen::Index>(t), p + j) = eps_hat[at - 1 - static_cast<std::size_t>(j)];
        }
    }
    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    for (int i = 0; i < p + q; ++i) {
        double b = beta(i);
        if (!std::isfinite(b)) b = 0.0;
        params[mu_off + static_cast<std::size_t>(i)] = std::clamp(b, -0.98, 0.98);
    }
    std::vector<double> phi(params.begin() + static_cast<std::ptrdiff_t>(mu_off),
                            params.begin() + static_cast<std::ptrdiff_t>(mu_off + static_cast<std::size_t>(p)));
    enforce_stationarity(phi);
    std::copy(phi.begin(), phi.end(), params.begin() + static_cast<std::ptrdiff_t>(mu_off));
    return params;
}

/// Levenberg-Marquardt on the CSS residuals with the analytic Jacobian from
/// css_eval. Returns whether a convergence criterion fired (as opposed to
/// the iteration cap).
inline bool levenberg_marquardt(const std::vector<double>& w, int p, int q, bool with_mean,
                                std::vector<double>& params, std::size_t condition) {
    const std::size_t npar = params.size();
    if (npar == 0) return true;
    const std::size_t mu_off = with_mean ? 1 : 0;
    const std::size_t start = std::max<std::size_t>(condition, static_cast<std::size_t>(p));

    auto project_stationary = [&](std::vector<double>& pars) {
        std::vector<double> phi(pars.begin() + static_cast<std::ptrdiff_t>(mu_off),
                                pars.begin() + static_cast<std::ptrdiff_t>(mu_off + static_cast<std::size_t>(p)));
        enforce_stationarity(phi);
        std::copy(phi.begin(), phi.end(), pars.begin() + static_cast<std::ptrdiff_t>(mu_off));
        std::vector<double> theta(pars.begin() + static_cast<std::ptrdiff_t>(mu_off + static_cast<std::size_t>(p)),
                                  pars.end());
        enforce_invertibility(theta);
        std::copy(theta.begin(), theta.end(),
                  pars.begin() + static_cast<std::ptrdiff_t>(mu_off + static_cast<std::size_t>(p)));
    };

    CssEval cur = css_eval(w, p, q, with_mean, params, condition, true);
    if (!std::isfinite(cur.sum_sq)) {
        std::fill(params.begin() + static_cast<std::ptrdiff_t>(mu_off), params.end(), 0.0);
        cur = css_eval(w, p, q, with_mean, params, condition, true);
    }

    double lambda = 1e-3;
    const std::size_t n = w.size();
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::MatrixXd JtJ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(npar),
                                                    static_cast<Eigen::Index>(npar));
        Eigen::VectorXd Jte = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(npar));
        for (std::size_t t = start; t < n; ++t) {
            for (std::size_t a = 0; a < npar; ++a) {
                Jte(static_cast<Eigen::Index>(a)) += cur.deriv[a][t] * cur.residuals[t];
                for (std::size_t b = a; b < npar; ++b) {
                    JtJ(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                        cur.deriv[a][t] * cur.deriv[b][t];
                }
            }
        }
        for (std::size_t a = 0; a < npar; ++a) {
            for (std::size_t b = 0; b < a; ++b) {
                JtJ(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                    JtJ(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
            }
        }

        if (2.0 * Jte.norm() < 1e-10 * (1.0 + cur.sum_sq)) return true;

        bool stepped = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::MatrixXd A = JtJ;
            for (std::size_t k = 0; k < npar; ++k) {
                const auto kk = static_cast<Eigen::Index>(k);
                A(kk, kk) += lambda * std::max(JtJ(kk, kk), 1e-12);
            }
            Eigen::VectorXd delta = A.ldlt().solve(-Jte);
            std::vector<double> trial = params;
            for (std::size_t k = 0; k < npar; ++k) trial[k] += delta(static_cast<Eigen::Index>(k));
            project_stationary(trial);
            const CssEval probe = css_eval(w, p, q, with_mean, trial, condition, false);
            if (std::isfinite(probe.sum_sq) && probe.sum_sq <= cur.sum_sq) {
                const double improvement = cur.sum_sq - probe.sum_sq;
                params = std::move(trial);
                cur = css_eval(w, p, q, with_mean, params, condition, true);
                lambda = std::max(lambda * 0.5, 1e-12);
                stepped = true;
                if (improvement < 1e-12 * (1.0 + cur.sum_sq)) return true;
                break;
            }
            lambda *= 4.0;
        }
        if (!stepped) return true; // no descent direction left at any damping
    }
    return false;
}

} // namespace arima_detail

/// Fit ARIMA(p,d,q) on level data. `condition` widens the residual
/// conditioning window so different orders can share a likelihood window
/// during order selection; 0 means the model's natural window.
inline ArimaFit fit_arima(const std::vector<double>& values, const ArimaSpec& spec,
                          std::size_t condition = 0) {
    if (spec.p < 0 || spec.d < 0 || spec.q < 0 || spec.p > 12 || spec.d > 4 || spec.q > 12) {
        raise(errc::config_error, "unsupported ARIMA order");
    }
    if (values.size() <= static_cast<std::size_t>(spec.p + spec.d + spec.q + 10)) {
        raise(errc::series_too_short, "need length > p + d + q + 10");
    }

    const std::vector<double> w = arima_detail::difference(values, spec.d);
    const bool with_mean = spec.d == 0;

    ArimaFit fit;
    fit.spec = spec;
    std::vector<double> params = arima_detail::initial_params(w, spec.p, spec.q, with_mean);
    if (!params.empty()) {
        fit.converged =
            arima_detail::levenberg_marquardt(w, spec.p, spec.q, with_mean, params, condition);
    }

    const std::size_t mu_off = with_mean ? 1 : 0;
    fit.intercept = with_mean ? params[0] : 0.0;
    fit.ar_coeffs.assign(params.begin() + static_cast<std::ptrdiff_t>(mu_off),
                         params.begin() + static_cast<std::ptrdiff_t>(mu_off + static_cast<std::size_t>(spec.p)));
    fit.ma_coeffs.assign(params.begin() + static_cast<std::ptrdiff_t>(mu_off + static_cast<std::size_t>(spec.p)),
                         params.end());
    arima_detail::enforce_stationarity(fit.ar_coeffs);
    arima_detail::enforce_invertibility(fit.ma_coeffs);
    std::copy(fit.ar_coeffs.begin(), fit.ar_coeffs.end(),
              params.begin() + static_cast<std::ptrdiff_t>(mu_off));
    std::copy(fit.ma_coeffs.begin(), fit.ma_coeffs.end(),
              params.begin() + static_cast<std::ptrdiff_t>(mu_off + static_cast<std::size_t>(spec.p)));

    const arima_detail::CssEval eval =
        arima_detail::css_eval(w, spec.p, spec.q, with_mean, params, condition, false);
    fit.n_effective = eval.n_terms;
    fit.innovation_variance = eval.n_terms > 0 ? eval.sum_sq / static_cast<double>(eval.n_terms) : 0.0;
    const double sigma2 = std::max(fit.innovation_variance, 1e-300);
    fit.log_likelihood =
        -0.5 * static_cast<double>(eval.n_terms) * (std::log(2.0 * M_PI * sigma2) + 1.0);

    const std::size_t n_w = w.size();
    for (int i = spec.p; i >= 1; --i) fit.w_tail.push_back(w[n_w - static_cast<std::size_t>(i)]);
    for (int j = spec.q; j >= 1; --j) fit.eps_tail.push_back(eval.residuals[n_w - static_cast<std::size_t>(j)]);
    std::vector<double> stage = values;
    for (int k = 0; k < spec.d; ++k) {
        fit.level_tail.push_back(stage.back());
        stage = arima_detail::difference(stage, 1);
    }
    return fit;
}

inline ArimaFit fit_arima(const HourlySeries& series, const ArimaSpec& spec) {
    return fit_arima(series.values, spec);
}

/// Iterated conditional-expectation forecasts (innovations zero beyond the
/// origin), integrated d times back to level scale.
inline std::vector<double> forecast_arima(const ArimaFit& fit, std::size_t horizon) {
    if (horizon < 1) raise(errc::out_of_range, "horizon must be >= 1");
    const int p = fit.spec.p;
    const int q = fit.spec.q;
    std::vector<double> w_hist = fit.w_tail;
    std::vector<double> eps_hist = fit.eps_tail;
    std::vector<double> w_fore(horizon, 0.0);
    for (std::size_t h = 0; h < horizon; ++h) {
        double value = fit.intercept;
        for (int i = 0; i < p; ++i) {
            const std::size_t hist = w_hist.size();
            if (hist > static_cast<std::size_t>(i)) {
                value += fit.ar_coeffs[static_cast<std::size_t>(i)] *
                         (w_hist[hist - 1 - static_cast<std::size_t>(i)] - fit.intercept);
            }
        }
        for (int j = 0; j < q; ++j) {
            const std::size_t hist = eps_hist.size();
            if (hist > static_cast<std::size_t>(j)) {
                value += fit.ma_coeffs[static_cast<std::size_t>(j)] *
                         eps_hist[hist - 1 - static_cast<std::size_t>(j)];
            }
        }
        w_fore[h] = value;
        w_hist.push_back(value);
        eps_hist.push_back(0.0);
    }

    std::vector<double> out = std::move(w_fore);
    for (int k = fit.spec.d - 1; k >= 0; --k) {
        double level = fit.level_tail[static_cast<std::size_t>(k)];
        for (std::size_t h = 0; h < horizon; ++h) {
            level += out[h];
            out[h] = level;
        }
    }
    return out;
}

/// Order selection: d via the successive-differencing variance test, then a
/// (p,q) grid minimizing AICc. Ties break to smaller p+q, then smaller p.
inline ArimaSpec auto_arima_order(const std::vector<double>& values, int max_p = 5, int max_q = 5,
                                  int max_d = 2) {
    if (values.size() < 50) raise(errc::series_too_short, "order selection needs length >= 50");

    int d = 0;
    {
        std::vector<double> w = values;
        while (d < max_d) {
            const std::vector<double> w_next = arima_detail::difference(w, 1);
            if (variance_of(w_next) < variance_of(w)) {
                w = w_next;
                ++d;
            } else {
                break;
            }
        }
    }

    const auto condition = static_cast<std::size_t>(max_p);
    double best_aicc = std::numeric_limits<double>::infinity();
    ArimaSpec best{0, d, 0};
    for (int sum = 0; sum <= max_p + max_q; ++sum) {
        for (int p = 0; p <= std::min(sum, max_p); ++p) {
            const int q = sum - p;
            if (q > max_q) continue;
            const ArimaSpec spec{p, d, q};
            double aicc;
            try {
                const ArimaFit fit = fit_arima(values, spec, condition);
                // Near-unit-circle roots mark numerically degenerate fits.
                if (arima_detail::max_root_modulus(fit.ar_coeffs) > 0.999) continue;
                std::vector<double> neg_theta = fit.ma_coeffs;
                for (double& t : neg_theta) t = -t;
                if (arima_detail::max_root_modulus(neg_theta) > 0.999) continue;
                const double k = static_cast<double>(p + q + (d == 0 ? 1 : 0) + 1);
                const double n_eff = static_cast<double>(fit.n_effective);
                if (n_eff - k - 1.0 <= 0.0) continue;
                aicc = -2.0 * fit.log_likelihood + 2.0 * k + 2.0 * k * (k + 1.0) / (n_eff - k - 1.0);
            } catch (const Error&) {
                continue;
            }
            if (std::isfinite(aicc) && aicc < best_aicc) {
                best_aicc = aicc;
                best = spec;
            }
        }
    }
    if (!std::isfinite(best_aicc)) raise(errc::non_convergence, "no ARIMA order could be fitted");
    return best;
}

inline ArimaSpec auto_arima_order(const HourlySeries& series) {
    return auto_arima_order(series.values);
}

} // namespace co2cast
