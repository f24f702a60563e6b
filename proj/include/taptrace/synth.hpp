#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "taptrace/config.hpp"
#include "taptrace/keyboard.hpp"
#include "taptrace/sensor_model.hpp"

namespace taptrace {

/// Knobs for the synthetic trace generator. The accelerometer carries a
/// half-sine SqSum excursion per tap; orientation carries a Gaussian bump
/// whose amplitude is linear in the key's normalized offset from the layout
/// center and whose peak time within the window is keyed to the slot index.
struct GeneratorParams {
    double base_gravity = 9.81;    // m/s^2
    double acc_noise_sigma = 0.1;  // m/s^2, per axis, i.i.d.
    double ori_noise_sigma = 0.4;  // degrees, per axis, i.i.d.
    double tap_duration_ms_min = 60.0;
    double tap_duration_ms_max = 120.0;
    double normal_peak_lo = 80.0;  // SqSum peak band for normal taps
    double normal_peak_hi = 130.0;
    double forceful_fraction = 1.0 / 6.0;
    double forceful_peak_min = 140.0;  // m^2/s^4, must exceed normal_peak_hi
    double forceful_peak_span = 30.0;  // peak drawn in [min, min + span]
    double pitch_gain_deg = 4.0;  // degrees per unit normalized vertical offset
    double roll_gain_deg = 4.0;   // degrees per unit normalized horizontal offset
    double peak_phase_base = 0.2;  // orientation bump center, window fraction
    double peak_phase_span = 0.6;  // plus span * slot/(n-1)
    double bump_width = 0.12;      // bump sigma as window fraction
    double rate_acc_hz = 100.0;
    double rate_ori_hz = 100.0;
    double inter_tap_gap_ms_min = 250.0;
    double inter_tap_gap_ms_max = 450.0;

    void validate() const;
    static GeneratorParams from_config(const Config& cfg,
                                       const std::string& section = "generator");
};

struct SynthResult {
    Trace trace;
    std::vector<GroundTruthTap> taps;
};

/// Deterministic in (script, layout, params, seed): equal inputs give
/// byte-identical serialized traces. Throws naming any unknown script label.
SynthResult generate_trace(const std::vector<std::string>& script,
                           const KeyboardLayout& layout,
                           const GeneratorParams& params, std::uint64_t seed);

/// Splits a string into one single-character label per byte.
std::vector<std::string> script_from_string(std::string_view chars);

}  // namespace taptrace
