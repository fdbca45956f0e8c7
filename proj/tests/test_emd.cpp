#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "co2cast/emd.hpp"
#include "co2cast/rng.hpp"

using namespace co2cast;

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

std::vector<double> sine(std::size_t n, double period, double amplitude = 1.0, double offset = 0.0) {
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = offset + amplitude * std::sin(two_pi * static_cast<double>(t) / period);
    }
    return x;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean_of(a), mb = mean_of(b);
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(da * db);
}

/// Random series with tunable smoothness (moving-average filtered noise).
std::vector<double> random_series(std::size_t n, std::uint64_t seed, std::size_t smooth = 1) {
    Rng rng(seed);
    std::vector<double> x(n + smooth);
    for (auto& v : x) v = rng.next_gaussian();
    std::vector<double> out(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t k = 0; k <= smooth; ++k) out[t] += x[t + k];
        out[t] /= static_cast<double>(smooth + 1);
    }
    return out;
}

} // namespace

TEST_CASE("find_extrema basics") {
    SECTION("alternating signal") {
        const Extrema ex = find_extrema({0, 1, 0, -1, 0, 1, 0});
        CHECK(ex.maxima_idx == std::vector<std::size_t>{1, 5});
        CHECK(ex.minima_idx == std::vector<std::size_t>{3});
    }
    SECTION("monotone ramp has no extrema") {
        const Extrema ex = find_extrema({0, 1, 2, 3, 4});
        CHECK(ex.maxima_idx.empty());
        CHECK(ex.minima_idx.empty());
    }
    SECTION("plateau midpoint, round half down") {
        const Extrema ex = find_extrema({0, 1, 1, 0});
        REQUIRE(ex.maxima_idx.size() == 1);
        CHECK(ex.maxima_idx[0] == 1);
        const Extrema ex3 = find_extrema({0, 1, 1, 1, 0});
        REQUIRE(ex3.maxima_idx.size() == 1);
        CHECK(ex3.maxima_idx[0] == 2);
    }
}

TEST_CASE("count_zero_crossings") {
    CHECK(count_zero_crossings({1, -1, 1, -1}) == 3);
    CHECK(count_zero_crossings({1, 0, -1}) == 1); // zero run counts once
    CHECK(count_zero_crossings({1, 2, 3}) == 0);
}

TEST_CASE("build_envelopes") {
    SECTION("equal-height extrema give a flat envelope") {
        std::vector<double> x(40, 0.0);
        x[10] = 1.0;
        x[30] = 1.0;
        x[5] = -1.0;
        x[20] = -1.0;
        const EnvelopePair env = build_envelopes(x, find_extrema(x));
        for (std::size_t t = 0; t < x.size(); ++t) {
            CHECK_THAT(env.upper[t], Catch::Matchers::WithinAbs(1.0, 1e-9));
            CHECK_THAT(env.lower[t], Catch::Matchers::WithinAbs(-1.0, 1e-9));
        }
    }
    SECTION("sinusoid envelopes sit near +-1 in the interior") {
        const std::vector<double> x = sine(256, 32.0);
        const EnvelopePair env = build_envelopes(x, find_extrema(x));
        for (std::size_t t = 16; t + 16 < x.size(); ++t) {
            CHECK(std::abs(env.upper[t] - 1.0) < 0.05);
            CHECK(std::abs(env.lower[t] + 1.0) < 0.05);
        }
    }
    SECTION("too few extrema") {
        std::vector<double> x(20, 0.0);
        x[3] = -1.0;
        x[9] = 1.0;
        x[15] = -1.0; // one maximum, two minima
        try {
            build_envelopes(x, find_extrema(x));
            FAIL("expected TooFewExtrema");
        } catch (const Error& e) {
            CHECK(e.code() == errc::too_few_extrema);
        }
    }
}

TEST_CASE("imf_check") {
    CHECK(imf_check(sine(240, 24.0)));
    CHECK_FALSE(imf_check(sine(240, 24.0, 1.0, 5.0))); // mean-envelope violation
    std::vector<double> ramp(100);
    for (std::size_t t = 0; t < ramp.size(); ++t) ramp[t] = 0.1 * static_cast<double>(t) - 5.0;
    CHECK_FALSE(imf_check(ramp));
}

TEST_CASE("emd on canonical signals") {
    SECTION("monotone input yields no IMFs") {
        std::vector<double> x(64);
        for (std::size_t t = 0; t < x.size(); ++t) x[t] = static_cast<double>(t) * 0.5;
        const ImfSet set = emd(x);
        CHECK(set.imfs.empty());
        CHECK(set.residual == x);
    }
    SECTION("pure daily sinusoid is a single IMF") {
        const std::vector<double> x = sine(960, 24.0);
        const ImfSet set = emd(x);
        REQUIRE(set.imfs.size() >= 1);
        CHECK(correlation(set.imfs[0], x) > 0.99);
        double later_energy = 0.0;
        for (std::size_t k = 1; k < set.imfs.size(); ++k) {
            for (double v : set.imfs[k]) later_energy = std::max(later_energy, std::abs(v));
        }
        for (double v : set.residual) later_energy = std::max(later_energy, std::abs(v));
        CHECK(later_energy < 0.05);
    }
    SECTION("separates fast from slow sinusoid") {
        std::vector<double> fast = sine(1024, 8.0);
        std::vector<double> slow = sine(1024, 128.0);
        std::vector<double> x(1024);
        for (std::size_t t = 0; t < x.size(); ++t) x[t] = fast[t] + slow[t];
        const ImfSet set = emd(x);
        REQUIRE(set.imfs.size() >= 2);
        CHECK(correlation(set.imfs[0], fast) > 0.95);
    }
}

TEST_CASE("emd completeness and IMF validity on random series") {
    Rng seeds(777);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t smooth = trial % 3 == 0 ? 0 : trial % 3 == 1 ? 3 : 8;
        const std::vector<double> x = random_series(512, seeds.next_u64(), smooth);
        const ImfSet set = emd(x);
        const std::vector<double> back = set.reconstruct();
        double max_err = 0.0;
        for (std::size_t t = 0; t < x.size(); ++t) max_err = std::max(max_err, std::abs(back[t] - x[t]));
        CHECK(max_err < 1e-8);
        for (const auto& imf : set.imfs) CHECK(imf_check(imf));
    }
}

TEST_CASE("imf ordering by zero-crossing rate on smooth signals") {
    std::vector<double> x(1024);
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double tt = static_cast<double>(t);
        x[t] = std::sin(two_pi * tt / 16.0) + 0.8 * std::sin(two_pi * tt / 80.0) +
               0.6 * std::sin(two_pi * tt / 400.0);
    }
    const ImfSet set = emd(x);
    REQUIRE(set.imfs.size() >= 2);
    for (std::size_t k = 0; k + 1 < set.imfs.size(); ++k) {
        CHECK(count_zero_crossings(set.imfs[k]) + 1 >= count_zero_crossings(set.imfs[k + 1]));
    }
}

TEST_CASE("eemd degenerate configurations") {
    const std::vector<double> x = random_series(256, 404, 4);
    SECTION("zero noise equals plain emd exactly") {
        EemdConfig cfg;
        cfg.noise_amplitude = 0.0;
        cfg.ensemble_size = 50;
        const ImfSet a = eemd(x, cfg);
        const ImfSet b = emd(x, cfg);
        REQUIRE(a.imfs.size() == b.imfs.size());
        for (std::size_t k = 0; k < a.imfs.size(); ++k) CHECK(a.imfs[k] == b.imfs[k]);
        CHECK(a.residual == b.residual);
    }
    SECTION("single member equals emd of one noisy draw") {
        EemdConfig cfg;
        cfg.ensemble_size = 1;
        cfg.noise_amplitude = 0.2;
        cfg.seed = 31;
        const ImfSet a = eemd(x, cfg);
        Rng rng(derive_stream(cfg.seed, "eemd", 0));
        const double noise_std = cfg.noise_amplitude * stddev_of(x);
        std::vector<double> noisy(x.size());
        for (std::size_t t = 0; t < x.size(); ++t) noisy[t] = x[t] + noise_std * rng.next_gaussian();
        const ImfSet b = emd(noisy, cfg);
        REQUIRE(a.imfs.size() == b.imfs.size());
        for (std::size_t k = 0; k < a.imfs.size(); ++k) CHECK(a.imfs[k] == b.imfs[k]);
        CHECK(a.residual == b.residual);
    }
    SECTION("byte-identical across calls with one seed") {
        EemdConfig cfg;
        cfg.ensemble_size = 20;
        cfg.seed = 555;
        const ImfSet a = eemd(x, cfg);
        const ImfSet b = eemd(x, cfg);
        REQUIRE(a.imfs.size() == b.imfs.size());
        for (std::size_t k = 0; k < a.imfs.size(); ++k) CHECK(a.imfs[k] == b.imfs[k]);
        CHECK(a.residual == b.residual);
    }
}

TEST_CASE("eemd reconstruction error follows the noise law") {
    // The ensemble-mean reconstruction differs from the input by the mean of
    // the injected noise, so its std should scale like e/sqrt(M).
    const std::vector<double> x = sine(512, 24.0, 27.0, 74.0);
    EemdConfig cfg;
    cfg.noise_amplitude = 0.2;
    cfg.seed = 2024;
    const double sigma = stddev_of(x);
    for (std::size_t m : {25u, 100u}) {
        cfg.ensemble_size = m;
        const ImfSet set = eemd(x, cfg);
        const std::vector<double> back = set.reconstruct();
        std::vector<double> err(x.size());
        for (std::size_t t = 0; t < x.size(); ++t) err[t] = back[t] - x[t];
        const double expected = cfg.noise_amplitude * sigma / std::sqrt(static_cast<double>(m));
        const double observed = std::sqrt(mean_of([&] {
            std::vector<double> sq(err.size());
            for (std::size_t t = 0; t < err.size(); ++t) sq[t] = err[t] * err[t];
            return sq;
        }()));
        CHECK(observed > expected / 2.0);
        CHECK(observed < expected * 2.0);
    }
}

TEST_CASE("fine_to_coarse splits at the significant partial sum") {
    const std::size_t n = 600;
    SECTION("third partial sum departs from zero") {
        // Two zero-mean oscillations, then a constant-offset component.
        ImfSet set;
        set.imfs.push_back(sine(n, 8.0));
        set.imfs.push_back(sine(n, 32.0));
        std::vector<double> offset = sine(n, 128.0, 0.3);
        for (auto& v : offset) v += 2.0;
        set.imfs.push_back(offset);
        set.residual.assign(n, 10.0);

        const FineToCoarseSplit split = fine_to_coarse(set);
        CHECK(split.split_index == 3);
        for (std::size_t t = 0; t < n; ++t) {
            CHECK_THAT(split.high_freq[t],
                       Catch::Matchers::WithinAbs(set.imfs[0][t] + set.imfs[1][t], 1e-9));
            CHECK_THAT(split.low_freq[t], Catch::Matchers::WithinAbs(set.imfs[2][t], 1e-9));
        }
        CHECK(split.trend == set.residual);
    }
    SECTION("single zero-mean IMF falls back to all-high") {
        ImfSet set;
        set.imfs.push_back(sine(n, 24.0));
        set.residual.assign(n, 5.0);
        const FineToCoarseSplit split = fine_to_coarse(set);
        CHECK(split.split_index == 2); // m + 1: nothing significant
        CHECK(split.high_freq == set.imfs[0]);
        for (double v : split.low_freq) CHECK(v == 0.0);
    }
    SECTION("reconstruction identity") {
        ImfSet set;
        Rng rng(8);
        for (int k = 0; k < 4; ++k) set.imfs.push_back(random_series(n, rng.next_u64(), 2));
        set.residual = random_series(n, rng.next_u64(), 10);
        const FineToCoarseSplit split = fine_to_coarse(set);
        const std::vector<double> whole = set.reconstruct();
        for (std::size_t t = 0; t < n; ++t) {
            CHECK(std::abs(split.high_freq[t] + split.low_freq[t] + split.trend[t] - whole[t]) < 1e-8);
        }
    }
    SECTION("no IMFs") {
        ImfSet set;
        set.residual.assign(32, 1.0);
        try {
            fine_to_coarse(set);
            FAIL("expected NoImfs");
        } catch (const Error& e) {
            CHECK(e.code() == errc::no_imfs);
        }
    }
}
