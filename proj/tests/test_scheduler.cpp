#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "co2cast/rng.hpp"
#include "co2cast/scheduler.hpp"

using namespace co2cast;

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

/// Exhaustive C(24,d) subset search over all 2^24 masks (sum via subset DP).
/// Strict-improvement updates visit the earliest-hours mask first within
/// each popcount class, matching the earliest-hour tie rule.
std::vector<std::vector<std::size_t>> brute_force_schedules(const std::vector<double>& window) {
    static std::vector<double> sums;
    sums.assign(std::size_t{1} << 24, 0.0);
    std::vector<double> best_sum(25, std::numeric_limits<double>::infinity());
    std::vector<std::uint32_t> best_mask(25, 0);
    for (std::uint32_t mask = 1; mask < (1u << 24); ++mask) {
        const int low = __builtin_ctz(mask);
        sums[mask] = sums[mask & (mask - 1)] + window[static_cast<std::size_t>(low)];
        const int bits = __builtin_popcount(mask);
        if (sums[mask] < best_sum[static_cast<std::size_t>(bits)]) {
            best_sum[static_cast<std::size_t>(bits)] = sums[mask];
            best_mask[static_cast<std::size_t>(bits)] = mask;
        }
    }
    std::vector<std::vector<std::size_t>> chosen(25);
    for (int d = 1; d <= 24; ++d) {
        for (int h = 0; h < 24; ++h) {
            if (best_mask[static_cast<std::size_t>(d)] & (1u << h)) {
                chosen[static_cast<std::size_t>(d)].push_back(static_cast<std::size_t>(h));
            }
        }
    }
    return chosen;
}

DayAheadFrame frame_of(const std::vector<double>& window) {
    DayAheadFrame frame;
    frame.issue_hour = 12;
    frame.forecast.assign(48, 100.0);
    for (std::size_t h = 0; h < 24; ++h) frame.forecast[k_window_begin + h] = window[h];
    return frame;
}

} // namespace

TEST_CASE("schedule_flexible basics") {
    SECTION("increasing ramp picks the first hours") {
        std::vector<double> window(24);
        for (std::size_t h = 0; h < 24; ++h) window[h] = 10.0 + static_cast<double>(h);
        const ScheduleResult r = schedule_flexible(frame_of(window), 4);
        CHECK(r.chosen_hours == std::vector<std::size_t>{0, 1, 2, 3});
        CHECK_THAT(r.forecast_mean, Catch::Matchers::WithinAbs(11.5, 1e-12));
    }
    SECTION("all-equal window breaks ties to the earliest hours") {
        const ScheduleResult r = schedule_flexible(frame_of(std::vector<double>(24, 7.0)), 4);
        CHECK(r.chosen_hours == std::vector<std::size_t>{0, 1, 2, 3});
    }
    SECTION("duration bounds") {
        const DayAheadFrame f = frame_of(std::vector<double>(24, 1.0));
        for (std::size_t bad : {std::size_t{0}, std::size_t{25}}) {
            try {
                schedule_flexible(f, bad);
                FAIL("expected BadDuration");
            } catch (const Error& e) {
                CHECK(e.code() == errc::bad_duration);
            }
        }
    }
    SECTION("chosen mean never exceeds the window mean") {
        Rng rng(11);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> window(24);
            for (auto& v : window) v = 200.0 * rng.next_double();
            const double window_mean = mean_of(window);
            for (std::size_t d : {std::size_t{1}, std::size_t{4}, std::size_t{12}, std::size_t{24}}) {
                const ScheduleResult r = schedule_flexible(frame_of(window), d);
                CHECK(r.forecast_mean <= window_mean + 1e-12);
            }
        }
    }
}

TEST_CASE("schedule_flexible equals exhaustive subset search") {
    Rng rng(424);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> window(24);
        for (auto& v : window) v = 20.0 + 120.0 * rng.next_double();
        const auto oracle = brute_force_schedules(window);
        for (std::size_t d = 1; d <= 24; ++d) {
            const ScheduleResult r = schedule_flexible(frame_of(window), d);
            CHECK(r.chosen_hours == oracle[d]);
        }
    }
    // deliberate ties: integer-valued window
    std::vector<double> window = {3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3, 2, 3, 8, 4, 6, 2, 6, 4};
    const auto oracle = brute_force_schedules(window);
    for (std::size_t d = 1; d <= 24; ++d) {
        const ScheduleResult r = schedule_flexible(frame_of(window), d);
        CHECK(r.chosen_hours == oracle[d]);
    }
}

TEST_CASE("evaluate_schedule") {
    std::vector<double> window(24);
    for (std::size_t h = 0; h < 24; ++h) window[h] = 60.0 + 10.0 * std::sin(static_cast<double>(h));
    const ScheduleResult scheduled = schedule_flexible(frame_of(window), 4);

    SECTION("perfect forecast gives V_V == V_F") {
        const ScheduleResult r = evaluate_schedule(scheduled, window);
        REQUIRE(r.realized_mean.has_value());
        CHECK(*r.realized_mean == r.forecast_mean);
    }
    SECTION("constant realized values give V_V == c regardless of hours") {
        const ScheduleResult r = evaluate_schedule(scheduled, std::vector<double>(24, 42.0));
        CHECK(*r.realized_mean == 42.0);
    }
    SECTION("length contract") {
        try {
            evaluate_schedule(scheduled, std::vector<double>(23, 1.0));
            FAIL("expected LengthMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == errc::length_mismatch);
        }
    }
}

TEST_CASE("annual_savings under perfect foresight") {
    // 70 days of a pure daily cycle; every window sees the same 24 values.
    HourlySeries s;
    s.start_hour = 0;
    s.values.resize(70 * 24);
    for (std::size_t t = 0; t < s.values.size(); ++t) {
        s.values[t] = 100.0 + 50.0 * std::sin(two_pi * static_cast<double>(t) / 24.0);
    }
    const NamedMethod oracle{"oracle", PerfectForesightSpec{}, Strategy::recursive};
    std::vector<std::size_t> durations(24);
    for (std::size_t d = 0; d < 24; ++d) durations[d] = d + 1;
    const SavingsReport report = annual_savings(s, oracle, durations, 48);

    SECTION("full-window consumption has ratio exactly 1") {
        CHECK(report.rows.back().duration == 24);
        CHECK(report.rows.back().ratio == 1.0);
    }
    SECTION("ratio(4) matches the direct order-statistics computation") {
        // All windows share the same value multiset: hours 0..23 of the day.
        std::vector<double> window(24);
        for (std::size_t h = 0; h < 24; ++h) {
            // window hour h sits at global index 12 + 12 + h (issue 12:00 + 12)
            window[h] = 100.0 + 50.0 * std::sin(two_pi * static_cast<double>(24 + h) / 24.0);
        }
        std::vector<double> sorted = window;
        std::sort(sorted.begin(), sorted.end());
        const double expected =
            (sorted[0] + sorted[1] + sorted[2] + sorted[3]) / 4.0 / mean_of(window);
        CHECK_THAT(report.rows[3].ratio, Catch::Matchers::WithinRel(expected, 1e-12));
    }
    SECTION("ratio is non-decreasing in the duration") {
        for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
            CHECK(report.rows[i].ratio <= report.rows[i + 1].ratio + 1e-12);
        }
    }
    SECTION("contiguous-block baseline also anchors at ratio 1 for d = 24") {
        const SavingsReport block =
            annual_savings(s, oracle, {4, 24}, 48, BaselineKind::contiguous_block);
        CHECK(block.rows.back().ratio == 1.0);
        CHECK(block.rows.front().ratio < 1.0);
    }
}

TEST_CASE("annual_savings contracts") {
    const NamedMethod oracle{"oracle", PerfectForesightSpec{}, Strategy::recursive};
    SECTION("span shorter than 60 days") {
        HourlySeries s;
        s.values.assign(30 * 24, 10.0);
        try {
            annual_savings(s, oracle, {4}, 48);
            FAIL("expected InsufficientSpan");
        } catch (const Error& e) {
            CHECK(e.code() == errc::insufficient_span);
        }
    }
    SECTION("bad duration") {
        HourlySeries s;
        s.values.assign(70 * 24, 10.0);
        try {
            annual_savings(s, oracle, {0}, 48);
            FAIL("expected BadDuration");
        } catch (const Error& e) {
            CHECK(e.code() == errc::bad_duration);
        }
    }
}

TEST_CASE("ratio_stats") {
    Rng rng(988);
    HourlySeries s;
    s.start_hour = 0;
    s.values.resize(1600);
    for (std::size_t t = 0; t < s.values.size(); ++t) {
        s.values[t] = 80.0 + 20.0 * std::sin(two_pi * static_cast<double>(t) / 24.0) +
                      rng.next_gaussian();
    }
    SECTION("perfect foresight gives unit ratios with zero spread") {
        const auto rows = ratio_stats(s, {"oracle", PerfectForesightSpec{}, Strategy::recursive}, 20, 100, 5);
        REQUIRE(rows.size() == 48);
        for (const auto& row : rows) {
            CHECK(row.mean == 1.0);
            CHECK(row.stddev == 0.0);
            CHECK(row.median == 1.0);
        }
    }
    SECTION("48 rows regardless of iteration count") {
        const auto rows = ratio_stats(s, {"ar1", ModelSpec{ArimaSpec{1, 0, 0}}, Strategy::recursive}, 3, 100, 6);
        REQUIRE(rows.size() == 48);
        for (std::size_t h = 0; h < 48; ++h) CHECK(rows[h].hour == h);
    }
    SECTION("deterministic in the seed") {
        const NamedMethod m{"ar1", ModelSpec{ArimaSpec{1, 0, 0}}, Strategy::recursive};
        const auto a = ratio_stats(s, m, 5, 100, 7);
        const auto b = ratio_stats(s, m, 5, 100, 7);
        for (std::size_t h = 0; h < 48; ++h) {
            CHECK(a[h].mean == b[h].mean);
            CHECK(a[h].q1 == b[h].q1);
        }
    }
}
