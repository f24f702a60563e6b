#pragma once

#include <string>

#include "taptrace/config.hpp"
#include "taptrace/sensor_model.hpp"

namespace taptrace {

/// Accelerometer accuracy-reduction band. Samples whose SqSum falls strictly
/// inside (band_lo, band_hi) are rescaled to SqSum = target_sq with their
/// direction preserved; everything else passes through untouched.
struct ClampParams {
    double band_lo = 80.0;     // m^2/s^4, exclusive
    double band_hi = 130.0;    // m^2/s^4, exclusive
    double target_sq = 9.8 * 9.8;

    void validate() const;
    static ClampParams from_config(const Config& cfg,
                                   const std::string& section = "defence");
};

/// Rescales one accelerometer sample per the band rule. Out-of-band samples
/// are returned bit-identical; rescaling is skipped when SqSum already
/// equals target_sq to within a relative 1e-12, which makes the filter
/// exactly idempotent. Throws on orientation samples and non-finite values.
SensorSample clamp_filter(const SensorSample& s, const ClampParams& params);

/// clamp_filter over every accelerometer sample; orientation untouched.
Trace apply_clamp(const Trace& trace, const ClampParams& params);

/// Keeps samples at indices 0, factor, 2*factor, ... per sensor kind and
/// divides the nominal rates by factor. factor < 1 is an error.
Trace downsample(const Trace& trace, int factor);

}  // namespace taptrace
