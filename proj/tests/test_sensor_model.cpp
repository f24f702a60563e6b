#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "taptrace/defence.hpp"
#include "taptrace/rng.hpp"
#include "taptrace/sensor_model.hpp"

using namespace taptrace;

namespace {

SensorSample acc(std::int64_t t, double x, double y, double z) {
    return {t, SensorKind::Accelerometer, {x, y, z}};
}

SensorSample ori(std::int64_t t, double az, double pitch, double roll) {
    return {t, SensorKind::Orientation, {az, pitch, roll}};
}

Trace random_trace(Rng& rng, std::size_t n) {
    Trace trace;
    trace.rate_acc_hz = 100.0;
    trace.rate_ori_hz = 50.0;
    std::int64_t t_acc = 0, t_ori = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool is_acc = rng.bernoulli(0.5);
        SensorSample s;
        s.kind = is_acc ? SensorKind::Accelerometer : SensorKind::Orientation;
        std::int64_t& t = is_acc ? t_acc : t_ori;
        t += static_cast<std::int64_t>(rng.uniform_index(0, 20000000));
        s.t_ns = t;
        for (double& v : s.v) {
            // vary magnitudes so shortest-decimal formatting gets exercised
            const double mag = rng.uniform(-100.0, 100.0);
            const int shift = static_cast<int>(rng.uniform_index(0, 8)) - 4;
            v = mag * std::pow(10.0, shift);
        }
        trace.samples.push_back(s);
    }
    std::stable_sort(trace.samples.begin(), trace.samples.end(),
                     [](const SensorSample& a, const SensorSample& b) {
                         return a.t_ns < b.t_ns;
                     });
    return trace;
}

}  // namespace

TEST_SUITE("sensor_model") {

TEST_CASE("sq_sum computes the squared norm") {
    CHECK(sq_sum(acc(0, 1, 2, 2)) == 9.0);
    CHECK(sq_sum(acc(0, 3, 4, 12)) == 169.0);
    CHECK(sq_sum(acc(0, 0, 0, 9.8)) == doctest::Approx(96.04));
}

TEST_CASE("sq_sum at rest gravity 9.8 equals the clamp target exactly") {
    CHECK(sq_sum(acc(0, 0, 0, 9.8)) == ClampParams{}.target_sq);
}

TEST_CASE("sq_sum rejects orientation samples") {
    CHECK_THROWS_AS(sq_sum(ori(0, 0, 0, 0)), std::invalid_argument);
}

TEST_CASE("sq_sum is invariant under axis permutation and sign flips") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double x = rng.uniform(-20, 20);
        const double y = rng.uniform(-20, 20);
        const double z = rng.uniform(-20, 20);
        const double base = sq_sum(acc(0, x, y, z));
        CHECK(sq_sum(acc(0, -x, y, -z)) == base);  // sign flips are exact
        CHECK(sq_sum(acc(0, z, x, y)) == doctest::Approx(base).epsilon(1e-12));
        CHECK(sq_sum(acc(0, y, z, x)) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("empty sample section parses to a valid empty trace") {
    const Trace t = trace_from_text("#rate_acc=100,rate_ori=50\n");
    CHECK(t.samples.empty());
    CHECK(t.rate_acc_hz == 100.0);
    CHECK(t.rate_ori_hz == 50.0);
}

TEST_CASE("single sample line parses") {
    const Trace t =
        trace_from_text("#rate_acc=100,rate_ori=100\n0,ACC,0.0,0.0,9.8\n");
    REQUIRE(t.samples.size() == 1);
    CHECK(t.samples[0].kind == SensorKind::Accelerometer);
    CHECK(t.samples[0].t_ns == 0);
    CHECK(t.samples[0].v[2] == 9.8);
}

TEST_CASE("write then read is the identity, bytes included") {
    Rng rng(42);
    for (int round = 0; round < 10; ++round) {
        const Trace original = random_trace(rng, 1000);
        const std::string text = trace_to_text(original);
        const Trace parsed = trace_from_text(text);
        CHECK(parsed == original);
        CHECK(trace_to_text(parsed) == text);
    }
}

TEST_CASE("trace file round trip on disk") {
    Rng rng(3);
    const Trace original = random_trace(rng, 200);
    const std::string path = "test_trace_roundtrip.tmp";
    write_trace(original, path);
    const Trace parsed = read_trace(path);
    CHECK(parsed == original);
    std::remove(path.c_str());
}

TEST_CASE("malformed line reports its line number") {
    const std::string text = "#rate_acc=100,rate_ori=100\n0,ACC,1,2,3\nbogus\n";
    CHECK_THROWS_WITH_AS(trace_from_text(text),
                         doctest::Contains("line 3"), std::runtime_error);
    CHECK_THROWS_AS(trace_from_text("#rate_acc=100,rate_ori=100\n1,ACC,1,2\n"),
                    std::runtime_error);
    CHECK_THROWS_AS(trace_from_text("#rate_acc=100,rate_ori=100\n1,GYR,1,2,3\n"),
                    std::runtime_error);
    CHECK_THROWS_AS(trace_from_text("1,ACC,1,2,3\n"), std::runtime_error);
}

TEST_CASE("non-monotonic timestamps are rejected per kind") {
    const std::string bad =
        "#rate_acc=100,rate_ori=100\n10,ACC,0,0,9.8\n5,ACC,0,0,9.8\n";
    CHECK_THROWS_WITH_AS(trace_from_text(bad), doctest::Contains("monotonic"),
                         std::runtime_error);
    // interleaved kinds may each advance independently
    const std::string ok =
        "#rate_acc=100,rate_ori=100\n10,ACC,0,0,9.8\n5,ORI,0,0,0\n20,ACC,0,0,9.8\n";
    CHECK_NOTHROW(trace_from_text(ok));
}

TEST_CASE("ground truth round trips") {
    std::vector<GroundTruthTap> taps = {{"5", 1000, 2000, 230.5, 120.25},
                                        {"#", 5000, 6000, 400.0, 310.0}};
    const std::string text = ground_truth_to_text(taps);
    CHECK(ground_truth_from_text(text) == taps);
    CHECK_THROWS_AS(ground_truth_from_text("5,2000,1000,1,1\n"),
                    std::runtime_error);
}

TEST_CASE("samples_in selects kind and half-open window") {
    Trace t;
    t.samples = {acc(0, 0, 0, 9), ori(0, 0, 1, 2), acc(10, 0, 0, 9),
                 acc(20, 0, 0, 9)};
    const auto got = samples_in(t, SensorKind::Accelerometer, 0, 20);
    REQUIRE(got.size() == 2);
    CHECK(got[0].t_ns == 0);
    CHECK(got[1].t_ns == 10);
}

}  // TEST_SUITE
