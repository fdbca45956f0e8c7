#pragma once

#include <cstddef>
#include <vector>

#include "co2cast/error.hpp"

namespace co2cast {

/// Natural cubic spline through strictly increasing knots. Two knots fall
/// back to the straight line through them.
class NaturalCubicSpline {
public:
    NaturalCubicSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) raise(errc::too_few_extrema, "spline needs >= 2 knots");
        for (std::size_t i = 1; i < n; ++i) {
            if (!(x_[i] > x_[i - 1])) raise(errc::degenerate_input, "spline knots must increase");
        }
        m_.assign(n, 0.0);
        if (n == 2) return;

        // Tridiagonal system for interior second derivatives; natural ends m0 = m_{n-1} = 0.
        std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x_[i] - x_[i - 1];
            const double h1 = x_[i + 1] - x_[i];
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
        }
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double h0 = x_[i] - x_[i - 1];
            const double w = h0 / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
            if (i == 1) break;
        }
    }

    /// Evaluate at t; extrapolates the boundary cubic outside the knot range.
    double operator()(double t) const {
        const std::size_t n = x_.size();
        std::size_t hi = 1;
        while (hi + 1 < n && x_[hi] < t) ++hi;
        const std::size_t lo = hi - 1;
        const double h = x_[hi] - x_[lo];
        const double a = (x_[hi] - t) / h;
        const double b = (t - x_[lo]) / h;
        return a * y_[lo] + b * y_[hi] +
               ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[hi]) * h * h / 6.0;
    }

    void evaluate(const std::vector<double>& ts, std::vector<double>& out) const {
        out.resize(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) out[i] = (*this)(ts[i]);
    }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_; // second derivatives at knots
};

} // namespace co2cast
