#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "taptrace/config.hpp"
#include "taptrace/defence.hpp"
#include "taptrace/detection.hpp"
#include "taptrace/inference.hpp"
#include "taptrace/keyboard.hpp"
#include "taptrace/synth.hpp"

namespace taptrace {

struct DefenceSettings {
    bool clamp_enabled = false;
    ClampParams clamp;
    int downsample_factor = 1;

    static DefenceSettings from_config(const Config& cfg,
                                       const std::string& section = "defence");
};

struct ExperimentConfig {
    std::string layout_path = "layouts/numpad_3x4.layout";
    GeneratorParams generator;
    DetectionParams detection;
    DefenceSettings defence;
    TrainParams classifier;
    int taps_per_key = 40;
    double train_fraction = 0.7;
    bool perfect_detection = true;
    double match_tolerance_ms = 50.0;
    std::uint64_t seed = 1;
    Config raw;  // echoed into the report

    void validate() const;
    static ExperimentConfig from_config(const Config& cfg);
};

struct DetectionMetrics {
    double recall = 0.0;
    std::size_t matched = 0;
    std::size_t false_positives = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (window, tap)
    std::vector<double> timing_error_ms;                     // per match
};

/// Greedy one-to-one matching in detection time order: each window takes the
/// nearest unmatched ground-truth tap whose interval midpoint is within the
/// tolerance. Unmatched windows are false positives.
DetectionMetrics detection_metrics(const std::vector<GroundTruthTap>& truth,
                                   const std::vector<TapWindow>& detected,
                                   double match_tolerance_ms);

struct AttackPrediction {
    TapWindow window;
    std::vector<std::string> ranked;  // best first
    std::vector<double> probs;        // aligned with ranked
};

/// Full pipeline over one trace: detect, extract features, rank keys.
/// Windows without enough orientation data are skipped.
std::vector<AttackPrediction> run_attack(const Trace& trace,
                                         const ClassifierModel& model,
                                         const DetectionParams& detection,
                                         std::size_t k = 4);

struct Report {
    std::uint64_t seed = 0;
    std::size_t test_taps = 0;
    std::size_t detected_windows = 0;
    DetectionMetrics detection;
    double top1_accuracy = 0.0;
    double top4_accuracy = 0.0;
    std::vector<std::string> labels;
    // labels x (labels + missed): row = true key, last column counts test
    // taps that no detected window matched.
    std::vector<std::vector<std::size_t>> confusion;
    std::map<std::string, std::map<std::string, std::string>> config_echo;
};

/// Trains on undefended data, applies the configured defences to the test
/// trace only, runs the attack, and scores it. Deterministic in the config.
Report run_experiment(const ExperimentConfig& config);

std::string report_to_json(const Report& report);
std::string report_to_csv(const Report& report);
std::string report_json_to_csv(std::string_view json_text);

}  // namespace taptrace
