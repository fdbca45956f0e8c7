#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "co2cast/classical.hpp"
#include "co2cast/rng.hpp"

using namespace co2cast;

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

// Plain DFT periodogram oracle: power at integer period P, argmax over
// [2, n/2]. Independent of the Goertzel path in detect_period.
std::size_t periodogram_argmax_oracle(const std::vector<double>& x) {
    const std::size_t n = x.size();
    const double mean = mean_of(x);
    std::size_t best_p = 0;
    double best_power = -1.0;
    for (std::size_t period = 2; period <= n / 2; ++period) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = two_pi * static_cast<double>(t) / static_cast<double>(period);
            acc += (x[t] - mean) * std::complex<double>(std::cos(angle), -std::sin(angle));
        }
        const double power = std::norm(acc);
        if (power > best_power) {
            best_power = power;
            best_p = period;
        }
    }
    return best_p;
}

std::vector<double> daily_sine(std::size_t n, double trend_slope = 0.0, double noise = 0.0,
                               std::uint64_t seed = 0) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = std::sin(two_pi * static_cast<double>(t) / 24.0) +
               trend_slope * static_cast<double>(t) + noise * rng.next_gaussian();
    }
    return x;
}

} // namespace

TEST_CASE("detect_period finds the daily cycle") {
    SECTION("pure daily sinusoid, length 480") {
        const std::vector<double> x = daily_sine(480);
        CHECK(detect_period(x) == 24);
        CHECK(detect_period(x) == periodogram_argmax_oracle(x));
    }
    SECTION("noisy intensity-like series") {
        Rng rng(5);
        std::vector<double> x(1200);
        for (std::size_t t = 0; t < x.size(); ++t) {
            x[t] = 74.0 + 27.0 * std::sin(two_pi * static_cast<double>(t) / 24.0) +
                   3.0 * rng.next_gaussian();
        }
        CHECK(detect_period(x) == 24);
    }
    SECTION("constant series") {
        try {
            detect_period(std::vector<double>(100, 3.0));
            FAIL("expected NoDominantPeriod");
        } catch (const Error& e) {
            CHECK(e.code() == errc::no_dominant_period);
        }
    }
    SECTION("agrees with the oracle on random smooth signals") {
        Rng rng(31);
        for (int trial = 0; trial < 10; ++trial) {
            const std::size_t period = 6 + rng.next_below(40);
            std::vector<double> x(400);
            const double phase = rng.next_double() * two_pi;
            for (std::size_t t = 0; t < x.size(); ++t) {
                x[t] = std::sin(two_pi * static_cast<double>(t) / static_cast<double>(period) + phase) +
                       0.05 * rng.next_gaussian();
            }
            CHECK(detect_period(x) == periodogram_argmax_oracle(x));
        }
    }
}

TEST_CASE("decompose_classical on a constant series") {
    const std::vector<double> x(200, 42.0);
    const ClassicalDecomposition d = decompose_classical(x, 24);
    for (std::size_t t = 0; t < x.size(); ++t) {
        CHECK_THAT(d.trend[t], Catch::Matchers::WithinAbs(42.0, 1e-9));
        CHECK_THAT(d.seasonal[t], Catch::Matchers::WithinAbs(0.0, 1e-9));
        CHECK_THAT(d.random[t], Catch::Matchers::WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("decompose_classical recovers analytic components of sin + ramp") {
    const std::vector<double> x = daily_sine(1200, 0.01);
    const ClassicalDecomposition d = decompose_classical(x, 24);

    double max_seasonal_err = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        max_seasonal_err = std::max(
            max_seasonal_err,
            std::abs(d.seasonal[t] - std::sin(two_pi * static_cast<double>(t) / 24.0)));
    }
    CHECK(max_seasonal_err < 0.02);

    // On interior points the trend should track 0.01 t up to a constant drift.
    double drift = 0.0;
    std::size_t count = 0;
    for (std::size_t t = d.interior_begin; t < d.interior_end; ++t) {
        drift += d.trend[t] - 0.01 * static_cast<double>(t);
        ++count;
    }
    drift /= static_cast<double>(count);
    double max_trend_err = 0.0;
    for (std::size_t t = d.interior_begin; t < d.interior_end; ++t) {
        max_trend_err =
            std::max(max_trend_err, std::abs(d.trend[t] - 0.01 * static_cast<double>(t) - drift));
    }
    CHECK(max_trend_err < 0.02);
}

TEST_CASE("decomposition invariants hold on random series") {
    Rng rng(1234);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 100 + rng.next_below(400);
        const std::size_t period = 2 + rng.next_below(30);
        if (n < 2 * period) continue;
        std::vector<double> x(n);
        for (auto& v : x) v = 100.0 * rng.next_double() - 50.0;
        const ClassicalDecomposition d = decompose_classical(x, period);

        // Additivity is exact by construction.
        for (std::size_t t = 0; t < n; ++t) {
            CHECK(std::abs(d.seasonal[t] + d.trend[t] + d.random[t] - x[t]) < 1e-9);
        }
        // Seasonal periodicity and zero sum over one period.
        for (std::size_t t = 0; t < n; ++t) {
            CHECK(d.seasonal[t] == d.seasonal[t % period]);
        }
        double season_sum = 0.0;
        for (std::size_t j = 0; j < period; ++j) season_sum += d.seasonal[j];
        CHECK(std::abs(season_sum) < 1e-9);
    }
}

TEST_CASE("trend of a linear ramp is the ramp on interior points") {
    std::vector<double> x(300);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = 3.0 + 0.25 * static_cast<double>(t);
    for (std::size_t period : {7u, 24u}) {
        const ClassicalDecomposition d = decompose_classical(x, period);
        for (std::size_t t = d.interior_begin; t < d.interior_end; ++t) {
            CHECK(std::abs(d.trend[t] - x[t]) < 1e-9);
        }
    }
}

TEST_CASE("reconstruct_classical") {
    const std::vector<double> x = daily_sine(240, 0.02, 0.3, 9);
    const ClassicalDecomposition d = decompose_classical(x, 24);
    const std::vector<double> back = reconstruct_classical(d);
    for (std::size_t t = 0; t < x.size(); ++t) CHECK(std::abs(back[t] - x[t]) < 1e-9);

    ClassicalDecomposition bad = d;
    bad.random.pop_back();
    CHECK_THROWS_AS(reconstruct_classical(bad), Error);

    ClassicalDecomposition zero;
    zero.seasonal.assign(10, 0.0);
    zero.trend.assign(10, 0.0);
    zero.random.assign(10, 0.0);
    const std::vector<double> z = reconstruct_classical(zero);
    for (double v : z) CHECK(v == 0.0);
}

TEST_CASE("decompose_classical rejects short input") {
    try {
        decompose_classical(std::vector<double>(30, 1.0), 24);
        FAIL("expected SeriesTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == errc::series_too_short);
    }
}
