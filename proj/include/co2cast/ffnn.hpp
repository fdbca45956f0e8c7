#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "co2cast/error.hpp"
#include "co2cast/rng.hpp"
#include "co2cast/series.hpp"

namespace co2cast {

/// Single-hidden-layer autoregression: `lags` lagged inputs scaled to [0,1],
/// sigmoid hidden layer, linear output. `repeats` independently initialized
/// networks are trained and their outputs averaged.
struct FfnnSpec {
    int lags = 24;
    int hidden = 12;
    int repeats = 20;
    std::uint64_t seed = 0;
    int max_epochs = 400;

    void validate() const {
        if (lags < 1 || hidden < 1 || repeats < 1 || max_epochs < 1) {
            raise(errc::config_error, "invalid FFNN spec");
        }
    }
};

namespace ffnn_detail {

struct Network {
    Eigen::MatrixXd w1; // hidden x lags
    Eigen::VectorXd b1; // hidden
    Eigen::VectorXd w2; // hidden
    double b2 = 0.0;
};

inline Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
    return 1.0 / (1.0 + (-z.array()).exp());
}

/// Full-batch gradient descent with bold-driver step adaptation. Returns the
/// trained network and whether the loss improved on its initial value.
inline std::pair<Network, bool> train(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      int hidden, int max_epochs, Rng& rng) {
    const auto rows = X.rows();
    const auto lags = X.cols();
    Network net;
    net.w1.resize(hidden, lags);
    net.b1.resize(hidden);
    net.w2.resize(hidden);
    for (int i = 0; i < hidden; ++i) {
        for (int j = 0; j < lags; ++j) net.w1(i, j) = (rng.next_double() - 0.5) * 1.4;
        net.b1(i) = (rng.next_double() - 0.5) * 1.4;
        net.w2(i) = (rng.next_double() - 0.5) * 1.4;
    }
    net.b2 = (rng.next_double() - 0.5) * 1.4;

    const double inv_rows = 1.0 / static_cast<double>(rows);
    auto loss_of = [&](const Network& n) {
        Eigen::MatrixXd h = sigmoid((X * n.w1.transpose()).rowwise() + n.b1.transpose());
        Eigen::VectorXd pred = h * n.w2;
        pred.array() += n.b2;
        return 0.5 * (pred - y).squaredNorm() * inv_rows;
    };

    double lr = 0.5;
    double loss = loss_of(net);
    const double initial_loss = loss;
    Network best = net;
    double best_loss = loss;
    int stale = 0;
    for (int epoch = 0; epoch < max_epochs; ++epoch) {
        Eigen::MatrixXd h = sigmoid((X * net.w1.transpose()).rowwise() + net.b1.transpose());
        Eigen::VectorXd pred = h * net.w2;
        pred.array() += net.b2;
        Eigen::VectorXd err = pred - y;

        Eigen::VectorXd gw2 = h.transpose() * err * inv_rows;
        const double gb2 = err.sum() * inv_rows;
        Eigen::MatrixXd dh = (err * net.w2.transpose()).array() * h.array() * (1.0 - h.array());
        Eigen::MatrixXd gw1 = dh.transpose() * X * inv_rows;
        Eigen::VectorXd gb1 = dh.colwise().sum().transpose() * inv_rows;

        Network trial = net;
        trial.w1 -= lr * gw1;
        trial.b1 -= lr * gb1;
        trial.w2 -= lr * gw2;
        trial.b2 -= lr * gb2;
        const double trial_loss = loss_of(trial);
        if (trial_loss <= loss) {
            net = std::move(trial);
            loss = trial_loss;
            lr *= 1.05;
            if (loss < best_loss - 1e-14) {
                best = net;
                best_loss = loss;
                stale = 0;
            } else {
                ++stale;
            }
        } else {
            lr *= 0.5;
            ++stale;
            if (lr < 1e-12) break;
        }
        if (best_loss < 1e-14 || stale > 30) break;
    }
    return {best, best_loss < initial_loss};
}

inline double predict(const Network& net, const Eigen::VectorXd& input) {
    Eigen::VectorXd h = sigmoid(net.w1 * input + net.b1);
    return net.w2.dot(h) + net.b2;
}

} // namespace ffnn_detail

/// Train the network ensemble and produce a multi-step forecast; under the
/// recursive strategy every one-step ensemble mean is fed back as the next
/// input. Deterministic for a fixed spec seed. Sets *warning when no network
/// reduced its initial loss.
inline std::vector<double> fit_forecast_ffnn_raw(const std::vector<double>& values,
                                                 const FfnnSpec& spec, std::size_t horizon,
                                                 bool* warning = nullptr) {
    spec.validate();
    if (horizon < 1) raise(errc::out_of_range, "horizon must be >= 1");
    const std::size_t n = values.size();
    const auto lags = static_cast<std::size_t>(spec.lags);
    if (n <= lags + 20) raise(errc::series_too_short, "need length > lags + 20");

    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    if (warning) *warning = false;
    if (hi - lo < 1e-12) {
        return std::vector<double>(horizon, values.back()); // constant series
    }
    const double scale = hi - lo;
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = (values[i] - lo) / scale;

    const std::size_t rows = n - lags;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), spec.lags);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    for (std::size_t t = 0; t < rows; ++t) {
        y(static_cast<Eigen::Index>(t)) = z[t + lags];
        for (std::size_t i = 0; i < lags; ++i) {
            // input i holds lag i+1 (most recent first)
            X(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = z[t + lags - 1 - i];
        }
    }

    std::vector<ffnn_detail::Network> nets;
    nets.reserve(static_cast<std::size_t>(spec.repeats));
    bool any_improved = false;
    for (int r = 0; r < spec.repeats; ++r) {
        Rng rng(derive_stream(spec.seed, "ffnn", static_cast<std::uint64_t>(r)));
        auto [net, improved] = ffnn_detail::train(X, y, spec.hidden, spec.max_epochs, rng);
        any_improved = any_improved || improved;
        nets.push_back(std::move(net));
    }
    if (warning && !any_improved) *warning = true;

    std::vector<double> window(z.end() - static_cast<std::ptrdiff_t>(lags), z.end());
    std::vector<double> out(horizon);
    Eigen::VectorXd input(spec.lags);
    for (std::size_t h = 0; h < horizon; ++h) {
        for (std::size_t i = 0; i < lags; ++i) {
            input(static_cast<Eigen::Index>(i)) = window[lags - 1 - i];
        }
        double mean_pred = 0.0;
        for (const auto& net : nets) mean_pred += ffnn_detail::predict(net, input);
        mean_pred /= static_cast<double>(nets.size());
        out[h] = mean_pred * scale + lo;
        window.erase(window.begin());
        window.push_back(mean_pred);
    }
    return out;
}

} // namespace co2cast
