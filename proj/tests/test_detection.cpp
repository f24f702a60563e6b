#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "taptrace/defence.hpp"
#include "taptrace/detection.hpp"
#include "taptrace/rng.hpp"

using namespace taptrace;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGravity = 9.81;
const double kGravitySq = kGravity * kGravity;

Trace flat_trace(double z, std::size_t n = 300) {
    Trace t;
    for (std::size_t i = 0; i < n; ++i) {
        t.samples.push_back({static_cast<std::int64_t>(i) * 10000000,
                             SensorKind::Accelerometer,
                             {0.0, 0.0, z}});
    }
    return t;
}

// Adds a half-sine SqSum excursion from the resting value up (or down) to
// peak_sq over [start_ms, start_ms + width_ms).
void add_pulse(Trace& t, double start_ms, double width_ms, double peak_sq) {
    for (SensorSample& s : t.samples) {
        if (s.kind != SensorKind::Accelerometer) continue;
        const double t_ms = static_cast<double>(s.t_ns) / 1e6;
        if (t_ms < start_ms || t_ms >= start_ms + width_ms) continue;
        const double u = (t_ms - start_ms) / width_ms;
        const double sq = kGravitySq + (peak_sq - kGravitySq) * std::sin(kPi * u);
        s.v = {0.0, 0.0, std::sqrt(sq)};
    }
}

}  // namespace

TEST_SUITE("detection") {

TEST_CASE("a constant trace yields no windows") {
    const DetectionParams params;
    CHECK(detect_taps(flat_trace(kGravity), params).empty());
}

TEST_CASE("a trace without accelerometer samples is an input error") {
    Trace t;
    t.samples.push_back({0, SensorKind::Orientation, {0, 0, 0}});
    t.samples.push_back({10000000, SensorKind::Orientation, {0, 0, 0}});
    CHECK_THROWS_AS(detect_taps(t, DetectionParams{}), std::runtime_error);
}

TEST_CASE("one injected pulse yields exactly one overlapping window") {
    Trace t = flat_trace(kGravity);
    add_pulse(t, 460.0, 80.0, 120.0);
    const DetectionParams params;
    const auto windows = detect_taps(t, params);
    REQUIRE(windows.size() == 1);
    CHECK(windows[0].start_ns < windows[0].end_ns);
    CHECK(windows[0].start_ns >= 460000000);
    CHECK(windows[0].start_ns < 540000000);
    CHECK(windows[0].end_ns > 460000000);
    CHECK(windows[0].end_ns <= 550000000);
}

TEST_CASE("a dip below gravity is also a window") {
    Trace t = flat_trace(kGravity);
    add_pulse(t, 460.0, 80.0, 82.0);  // dips toward the bottom of the band
    CHECK(detect_taps(t, DetectionParams{}).size() == 1);
}

TEST_CASE("the clamp defence hides in-band pulses from detection") {
    Trace t = flat_trace(kGravity);
    add_pulse(t, 460.0, 80.0, 120.0);
    add_pulse(t, 900.0, 80.0, 84.0);
    const Trace defended = apply_clamp(t, ClampParams{});
    CHECK(detect_taps(defended, DetectionParams{}).empty());
}

TEST_CASE("sub-threshold pulses stay undetected") {
    Trace t = flat_trace(kGravity);
    add_pulse(t, 460.0, 80.0, 99.0);  // peak deviation 2.76 < tau_on
    CHECK(detect_taps(t, DetectionParams{}).empty());
}

TEST_CASE("windows violating duration bounds are discarded") {
    DetectionParams params;
    Trace t = flat_trace(kGravity, 600);
    add_pulse(t, 500.0, 20.0, 125.0);  // too short once thresholds apply
    CHECK(detect_taps(t, params).empty());

    Trace long_pulse = flat_trace(kGravity, 600);
    add_pulse(long_pulse, 500.0, 400.0, 125.0);  // larger than max_dur
    CHECK(detect_taps(long_pulse, params).empty());
}

TEST_CASE("a refractory gap suppresses immediate retriggers") {
    DetectionParams params;
    Trace close = flat_trace(kGravity, 600);
    add_pulse(close, 100.0, 80.0, 120.0);
    add_pulse(close, 200.0, 80.0, 120.0);  // tail lands inside refractory
    CHECK(detect_taps(close, params).size() == 1);

    Trace apart = flat_trace(kGravity, 600);
    add_pulse(apart, 100.0, 80.0, 120.0);
    add_pulse(apart, 500.0, 80.0, 120.0);
    CHECK(detect_taps(apart, params).size() == 2);
}

TEST_CASE("raising tau_on never increases the window count") {
    Rng rng(31);
    for (int round = 0; round < 30; ++round) {
        Trace t = flat_trace(kGravity, 4000);
        const int pulses = static_cast<int>(rng.uniform_index(1, 12));
        double cursor = 200.0;
        for (int pulse = 0; pulse < pulses; ++pulse) {
            const double width = rng.uniform(20.0, 250.0);
            const double peak = rng.uniform(80.0, 130.0);
            add_pulse(t, cursor, width, peak);
            cursor += width + rng.uniform(400.0, 900.0);
        }
        std::size_t prev = SIZE_MAX;
        std::size_t prev_accepted = SIZE_MAX;
        for (double tau_on : {2.0, 3.0, 5.0, 8.0, 12.0}) {
            DetectionParams params;
            params.tau_on = tau_on;
            params.tau_off = tau_on / 2.0;
            const auto windows = detect_taps(t, params);
            CHECK(windows.size() <= prev);
            prev = windows.size();
            // windows are disjoint and sorted
            for (std::size_t i = 0; i + 1 < windows.size(); ++i) {
                CHECK(windows[i].end_ns <= windows[i + 1].start_ns);
            }
            (void)prev_accepted;
        }
    }
}

TEST_CASE("detection features of a clean half-sine pulse") {
    Trace t = flat_trace(kGravity);
    add_pulse(t, 460.0, 80.0, kGravitySq + 24.0);
    const DetectionParams params;
    const TapWindow window{460000000, 540000000};
    const DetectionFeatures f = extract_detection_features(t, window, params);
    CHECK(f.peak_over == doctest::Approx(24.0).epsilon(1e-9));
    CHECK(f.peak_under == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(f.time_to_peak_ms == doctest::Approx(40.0));
    CHECK(f.duration_ms == doctest::Approx(80.0));
}

TEST_CASE("detection features of a biphasic pulse") {
    Trace t = flat_trace(kGravity);
    add_pulse(t, 460.0, 80.0, kGravitySq + 24.0);
    add_pulse(t, 540.0, 80.0, kGravitySq - 18.0);
    const DetectionParams params;
    const TapWindow window{460000000, 620000000};
    const DetectionFeatures f = extract_detection_features(t, window, params);
    CHECK(f.peak_over == doctest::Approx(24.0).epsilon(1e-9));
    CHECK(f.peak_under == doctest::Approx(18.0).epsilon(1e-9));
    CHECK(f.time_to_peak_ms == doctest::Approx(40.0));
    CHECK(f.peak_to_trough_ms == doctest::Approx(80.0));
    CHECK(f.duration_ms == doctest::Approx(160.0));
}

TEST_CASE("a window outside the trace span is a range error") {
    const Trace t = flat_trace(kGravity);
    const DetectionParams params;
    CHECK_THROWS_AS(
        extract_detection_features(t, {100000000000, 100000100000}, params),
        std::out_of_range);
}

TEST_CASE("rolling median baseline tracks a slow drift") {
    DetectionParams params;
    params.baseline_mode = BaselineMode::RollingMedian;
    params.rolling_window_ms = 400.0;
    Trace quiet;
    // gravity drifts from 9.81 to 10.1 over 6 s; no taps anywhere
    for (int i = 0; i < 600; ++i) {
        const double g = 9.81 + 0.29 * i / 600.0;
        quiet.samples.push_back({static_cast<std::int64_t>(i) * 10000000,
                                 SensorKind::Accelerometer,
                                 {0.0, 0.0, g}});
    }
    CHECK(detect_taps(quiet, params).empty());

    // a short burst riding on the drift is still found
    Trace burst = quiet;
    for (int i = 300; i < 308; ++i) {
        burst.samples[static_cast<std::size_t>(i)].v[2] += 1.5;
    }
    const auto windows = detect_taps(burst, params);
    REQUIRE(windows.size() == 1);
    CHECK(windows[0].start_ns >= 2990000000);
    CHECK(windows[0].end_ns <= 3110000000);
}

TEST_CASE("detection params validate") {
    DetectionParams p;
    p.tau_off = 5.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = DetectionParams{};
    p.min_dur_ms = 400.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

}  // TEST_SUITE
