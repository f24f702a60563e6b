#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace taptrace {

enum class SensorKind { Accelerometer, Orientation };

/// One timestamped 3-axis reading. Accelerometer carries (ax, ay, az) in
/// m/s^2; orientation carries (azimuth, pitch, roll) in degrees.
struct SensorSample {
    std::int64_t t_ns = 0;
    SensorKind kind = SensorKind::Accelerometer;
    std::array<double, 3> v{0.0, 0.0, 0.0};

    bool operator==(const SensorSample&) const = default;
};

struct Trace {
    std::vector<SensorSample> samples;  // time-ordered, monotonic per kind
    double rate_acc_hz = 100.0;
    double rate_ori_hz = 100.0;

    bool operator==(const Trace&) const = default;
};

struct GroundTruthTap {
    std::string key_label;
    std::int64_t press_t_ns = 0;
    std::int64_t release_t_ns = 0;
    double cx = 0.0;  // screen pixels
    double cy = 0.0;

    bool operator==(const GroundTruthTap&) const = default;
};

/// ax^2 + ay^2 + az^2 in m^2/s^4. Accelerometer samples only.
double sq_sum(const SensorSample& s);

/// Per-kind timestamp monotonicity and finite values; throws on violation.
void validate_trace(const Trace& trace);

/// Samples of one kind with t_ns in [start_ns, end_ns).
std::vector<SensorSample> samples_in(const Trace& trace, SensorKind kind,
                                     std::int64_t start_ns,
                                     std::int64_t end_ns);

// Trace file format: header `#rate_acc=<hz>,rate_ori=<hz>`, then one sample
// per line `<t_ns>,<ACC|ORI>,<x>,<y>,<z>`. Doubles are written as shortest
// round-trip decimals, so write -> read -> write is byte-identical.
std::string trace_to_text(const Trace& trace);
Trace trace_from_text(std::string_view text);
Trace read_trace(const std::string& path);
void write_trace(const Trace& trace, const std::string& path);

// Ground-truth file: `<key_label>,<press_t_ns>,<release_t_ns>,<cx>,<cy>`.
std::string ground_truth_to_text(const std::vector<GroundTruthTap>& taps);
std::vector<GroundTruthTap> ground_truth_from_text(std::string_view text);
std::vector<GroundTruthTap> read_ground_truth(const std::string& path);
void write_ground_truth(const std::vector<GroundTruthTap>& taps,
                        const std::string& path);

}  // namespace taptrace
