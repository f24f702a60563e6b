#include "taptrace/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace taptrace {

void DetectionParams::validate() const {
    if (!(0.0 < tau_off && tau_off < tau_on)) {
        throw std::invalid_argument("detection: need 0 < tau_off < tau_on");
    }
    if (!(0.0 < min_dur_ms && min_dur_ms < max_dur_ms)) {
        throw std::invalid_argument("detection: need 0 < min_dur < max_dur");
    }
    if (refractory_ms < 0.0) {
        throw std::invalid_argument("detection: refractory must be non-negative");
    }
    if (baseline_mode == BaselineMode::FixedGravity && fixed_gravity <= 0.0) {
        throw std::invalid_argument("detection: fixed_gravity must be positive");
    }
    if (baseline_mode == BaselineMode::RollingMedian && rolling_window_ms <= 0.0) {
        throw std::invalid_argument("detection: rolling window must be positive");
    }
}

DetectionParams DetectionParams::from_config(const Config& cfg,
                                             const std::string& section) {
    DetectionParams p;
    const std::string mode = cfg.get_str(section, "baseline_mode", "fixed_gravity");
    if (mode == "fixed_gravity") {
        p.baseline_mode = BaselineMode::FixedGravity;
    } else if (mode == "rolling_median") {
        p.baseline_mode = BaselineMode::RollingMedian;
    } else {
        throw std::runtime_error("detection: unknown baseline_mode '" + mode + "'");
    }
    p.fixed_gravity = cfg.get_double(section, "fixed_gravity", p.fixed_gravity);
    p.rolling_window_ms = cfg.get_double(section, "rolling_window_ms", p.rolling_window_ms);
    p.tau_on = cfg.get_double(section, "tau_on", p.tau_on);
    p.tau_off = cfg.get_double(section, "tau_off", p.tau_off);
    p.min_dur_ms = cfg.get_double(section, "min_dur_ms", p.min_dur_ms);
    p.max_dur_ms = cfg.get_double(section, "max_dur_ms", p.max_dur_ms);
    p.refractory_ms = cfg.get_double(section, "refractory_ms", p.refractory_ms);
    p.validate();
    return p;
}

std::vector<double> detection_baseline(const std::vector<SensorSample>& acc,
                                       const DetectionParams& params) {
    std::vector<double> baseline(acc.size());
    if (params.baseline_mode == BaselineMode::FixedGravity) {
        std::fill(baseline.begin(), baseline.end(),
                  params.fixed_gravity * params.fixed_gravity);
        return baseline;
    }
    const std::int64_t window_ns =
        static_cast<std::int64_t>(std::llround(params.rolling_window_ms * 1e6));
    std::vector<double> sq(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) sq[i] = sq_sum(acc[i]);
    std::vector<double> buf;
    std::size_t lo = 0;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        while (acc[i].t_ns - acc[lo].t_ns > window_ns) ++lo;
        buf.assign(sq.begin() + static_cast<std::ptrdiff_t>(lo),
                   sq.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        const std::size_t mid = buf.size() / 2;
        std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid),
                         buf.end());
        double median = buf[mid];
        if (buf.size() % 2 == 0) {
            const double below =
                *std::max_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid));
            median = (median + below) / 2.0;
        }
        baseline[i] = median;
    }
    return baseline;
}

std::vector<TapWindow> detect_taps(const Trace& trace,
                                   const DetectionParams& params) {
    params.validate();
    std::vector<SensorSample> acc;
    for (const SensorSample& s : trace.samples) {
        if (s.kind == SensorKind::Accelerometer) acc.push_back(s);
    }
    if (acc.empty()) {
        throw std::runtime_error("detect_taps: trace has no accelerometer samples");
    }
    const std::vector<double> baseline = detection_baseline(acc, params);
    const std::int64_t period_ns =
        static_cast<std::int64_t>(std::llround(1e9 / trace.rate_acc_hz));
    const std::int64_t min_dur_ns = static_cast<std::int64_t>(std::llround(params.min_dur_ms * 1e6));
    const std::int64_t max_dur_ns = static_cast<std::int64_t>(std::llround(params.max_dur_ms * 1e6));
    const std::int64_t refractory_ns = static_cast<std::int64_t>(std::llround(params.refractory_ms * 1e6));

    std::vector<TapWindow> windows;
    std::int64_t refractory_until = -1;
    bool open = false;
    std::int64_t start_ns = 0;

    const auto close_window = [&](std::int64_t end_ns) {
        const std::int64_t dur = end_ns - start_ns;
        if (dur >= min_dur_ns && dur <= max_dur_ns) {
            windows.push_back({start_ns, end_ns});
            refractory_until = end_ns + refractory_ns;
        }
        open = false;
    };

    for (std::size_t i = 0; i < acc.size(); ++i) {
        const double dev = std::abs(sq_sum(acc[i]) - baseline[i]);
        if (!open) {
            if (acc[i].t_ns < refractory_until) continue;
            if (dev > params.tau_on) {
                open = true;
                start_ns = acc[i].t_ns;
            }
        } else if (dev < params.tau_off) {
            close_window(acc[i].t_ns);
        }
    }
    if (open) close_window(acc.back().t_ns + period_ns);
    return windows;
}

std::vector<TapWindow> windows_from_ground_truth(
    const std::vector<GroundTruthTap>& taps) {
    std::vector<TapWindow> windows;
    windows.reserve(taps.size());
    for (const GroundTruthTap& tap : taps) {
        windows.push_back({tap.press_t_ns, tap.release_t_ns});
    }
    return windows;
}

DetectionFeatures extract_detection_features(const Trace& trace,
                                             const TapWindow& window,
                                             const DetectionParams& params) {
    params.validate();
    std::vector<SensorSample> acc;
    for (const SensorSample& s : trace.samples) {
        if (s.kind == SensorKind::Accelerometer) acc.push_back(s);
    }
    const std::vector<double> baseline = detection_baseline(acc, params);

    bool any = false;
    double max_dev = 0.0, min_dev = 0.0;
    std::int64_t t_max = 0, t_min = 0;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        if (acc[i].t_ns < window.start_ns || acc[i].t_ns >= window.end_ns) continue;
        const double dev = sq_sum(acc[i]) - baseline[i];
        if (!any) {
            max_dev = min_dev = dev;
            t_max = t_min = acc[i].t_ns;
            any = true;
            continue;
        }
        if (dev > max_dev) {
            max_dev = dev;
            t_max = acc[i].t_ns;
        }
        if (dev < min_dev) {
            min_dev = dev;
            t_min = acc[i].t_ns;
        }
    }
    if (!any) {
        throw std::out_of_range(
            "extract_detection_features: window contains no accelerometer samples");
    }
    DetectionFeatures f;
    f.peak_over = std::max(0.0, max_dev);
    f.peak_under = std::max(0.0, -min_dev);
    f.time_to_peak_ms = static_cast<double>(t_max - window.start_ns) / 1e6;
    f.peak_to_trough_ms = static_cast<double>(t_min - t_max) / 1e6;
    f.duration_ms = static_cast<double>(window.end_ns - window.start_ns) / 1e6;
    return f;
}

}  // namespace taptrace
