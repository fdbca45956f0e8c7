#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "co2cast/error.hpp"

namespace co2cast {

/// Upper-tail probability of the chi-square distribution with df degrees of freedom.
inline double chi_squared_survival(double statistic, double df) {
    if (statistic <= 0.0) return 1.0;
    boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

/// Two-sided p-value of a one-sample t-test for mean zero.
/// Zero-variance samples: p = 0 if the common value is nonzero, else 1.
inline double t_test_mean_zero(const std::vector<double>& sample) {
    const std::size_t n = sample.size();
    if (n < 2) raise(errc::degenerate_input, "t-test needs >= 2 observations");
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : sample) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(n - 1);
    if (var <= 0.0) return mean == 0.0 ? 1.0 : 0.0;
    const double t = mean / std::sqrt(var / static_cast<double>(n));
    boost::math::students_t dist(static_cast<double>(n - 1));
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

} // namespace co2cast
