#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "taptrace/config.hpp"
#include "taptrace/sensor_model.hpp"

namespace taptrace {

enum class BaselineMode { FixedGravity, RollingMedian };

struct DetectionParams {
    BaselineMode baseline_mode = BaselineMode::FixedGravity;
    double fixed_gravity = 9.81;      // baseline = fixed_gravity^2
    double rolling_window_ms = 500.0;  // trailing median window
    double tau_on = 4.0;               // m^2/s^4, |SqSum - baseline| to open
    double tau_off = 2.0;              // m^2/s^4, hysteresis release
    double min_dur_ms = 30.0;
    double max_dur_ms = 300.0;
    double refractory_ms = 100.0;      // dead time after an accepted window

    void validate() const;
    static DetectionParams from_config(const Config& cfg,
                                       const std::string& section = "detection");
};

/// Half-open time interval [start_ns, end_ns) holding one candidate tap.
struct TapWindow {
    std::int64_t start_ns = 0;
    std::int64_t end_ns = 0;

    std::int64_t mid_ns() const { return start_ns + (end_ns - start_ns) / 2; }
    bool operator==(const TapWindow&) const = default;
};

/// Shape summary of the SqSum excursion inside one window. Deviations are
/// SqSum minus the detection baseline; peak_under is the undershoot depth as
/// a magnitude. Argmax/argmin ties resolve to the earliest sample.
struct DetectionFeatures {
    double peak_over = 0.0;        // m^2/s^4
    double peak_under = 0.0;       // m^2/s^4
    double time_to_peak_ms = 0.0;  // window start -> peak deviation
    double peak_to_trough_ms = 0.0;
    double duration_ms = 0.0;
};

/// Per-accelerometer-sample baseline used by detection and feature
/// extraction (constant gravity^2, or a trailing median of SqSum).
std::vector<double> detection_baseline(const std::vector<SensorSample>& acc,
                                       const DetectionParams& params);

/// Hysteresis segmentation of the accelerometer stream: a window opens where
/// |SqSum - baseline| > tau_on, closes where it drops below tau_off, and is
/// kept only if its duration lies in [min_dur, max_dur]. Accepted windows
/// are followed by a refractory dead time. Throws if the trace has no
/// accelerometer samples.
std::vector<TapWindow> detect_taps(const Trace& trace,
                                   const DetectionParams& params);

std::vector<TapWindow> windows_from_ground_truth(
    const std::vector<GroundTruthTap>& taps);

/// Throws std::out_of_range when the window contains no accelerometer
/// samples of the trace.
DetectionFeatures extract_detection_features(const Trace& trace,
                                             const TapWindow& window,
                                             const DetectionParams& params);

}  // namespace taptrace
