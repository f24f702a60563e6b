#include "taptrace/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "taptrace/rng.hpp"
#include "taptrace/text.hpp"

namespace taptrace {

DefenceSettings DefenceSettings::from_config(const Config& cfg,
                                             const std::string& section) {
    DefenceSettings s;
    s.clamp_enabled = cfg.get_bool(section, "clamp", s.clamp_enabled);
    s.clamp = ClampParams::from_config(cfg, section);
    s.downsample_factor = static_cast<int>(
        cfg.get_int(section, "downsample_factor", s.downsample_factor));
    if (s.downsample_factor < 1) {
        throw std::runtime_error("defence: downsample_factor must be >= 1");
    }
    return s;
}

void ExperimentConfig::validate() const {
    if (taps_per_key < 2) {
        throw std::invalid_argument("experiment: taps_per_key must be >= 2");
    }
    if (!(0.0 < train_fraction && train_fraction < 1.0)) {
        throw std::invalid_argument("experiment: train_fraction must be in (0, 1)");
    }
    if (match_tolerance_ms < 0.0) {
        throw std::invalid_argument("experiment: match tolerance must be >= 0");
    }
    generator.validate();
    detection.validate();
    classifier.validate();
}

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
    ExperimentConfig e;
    e.layout_path = cfg.get_str("experiment", "layout", e.layout_path);
    e.generator = GeneratorParams::from_config(cfg);
    e.detection = DetectionParams::from_config(cfg);
    e.defence = DefenceSettings::from_config(cfg);
    e.classifier = TrainParams::from_config(cfg);
    e.taps_per_key =
        static_cast<int>(cfg.get_int("experiment", "taps_per_key", e.taps_per_key));
    e.train_fraction =
        cfg.get_double("experiment", "train_fraction", e.train_fraction);
    e.perfect_detection =
        cfg.get_bool("experiment", "perfect_detection", e.perfect_detection);
    e.match_tolerance_ms =
        cfg.get_double("experiment", "match_tolerance_ms", e.match_tolerance_ms);
    e.seed = static_cast<std::uint64_t>(
        cfg.get_int("experiment", "seed", static_cast<std::int64_t>(e.seed)));
    e.raw = cfg;
    e.validate();
    return e;
}

DetectionMetrics detection_metrics(const std::vector<GroundTruthTap>& truth,
                                   const std::vector<TapWindow>& detected,
                                   double match_tolerance_ms) {
    if (match_tolerance_ms < 0.0) {
        throw std::invalid_argument("detection_metrics: negative tolerance");
    }
    const std::int64_t tolerance_ns =
        static_cast<std::int64_t>(std::llround(match_tolerance_ms * 1e6));
    DetectionMetrics metrics;
    std::vector<bool> taken(truth.size(), false);
    for (std::size_t w = 0; w < detected.size(); ++w) {
        const std::int64_t mid = detected[w].mid_ns();
        std::size_t best = truth.size();
        std::int64_t best_diff = 0;
        for (std::size_t t = 0; t < truth.size(); ++t) {
            if (taken[t]) continue;
            const std::int64_t tap_mid =
                truth[t].press_t_ns + (truth[t].release_t_ns - truth[t].press_t_ns) / 2;
            const std::int64_t diff = std::abs(tap_mid - mid);
            if (diff <= tolerance_ns && (best == truth.size() || diff < best_diff)) {
                best = t;
                best_diff = diff;
            }
        }
        if (best == truth.size()) {
            ++metrics.false_positives;
        } else {
            taken[best] = true;
            metrics.pairs.emplace_back(w, best);
            metrics.timing_error_ms.push_back(static_cast<double>(best_diff) / 1e6);
        }
    }
    metrics.matched = metrics.pairs.size();
    metrics.recall = truth.empty() ? 0.0
                                   : static_cast<double>(metrics.matched) /
                                         static_cast<double>(truth.size());
    return metrics;
}

namespace {

AttackPrediction predict_window(const Trace& trace, const ClassifierModel& model,
                                const TapWindow& window, std::size_t k) {
    const TapFeatureVector fv = extract_tap_features(trace, window);
    const std::vector<double> probs = predict_proba(model, fv);
    AttackPrediction pred;
    pred.window = window;
    pred.ranked = top_k(model.labels, probs, k);
    for (const std::string& label : pred.ranked) {
        const auto it = std::find(model.labels.begin(), model.labels.end(), label);
        pred.probs.push_back(probs[static_cast<std::size_t>(
            std::distance(model.labels.begin(), it))]);
    }
    return pred;
}

}  // namespace

std::vector<AttackPrediction> run_attack(const Trace& trace,
                                         const ClassifierModel& model,
                                         const DetectionParams& detection,
                                         std::size_t k) {
    std::vector<AttackPrediction> out;
    for (const TapWindow& window : detect_taps(trace, detection)) {
        try {
            out.push_back(predict_window(trace, model, window, k));
        } catch (const std::runtime_error&) {
            // window without usable orientation data; drop it
        }
    }
    return out;
}

namespace {

// Balanced script: taps_each repetitions of every label, order shuffled.
std::vector<std::string> balanced_script(const std::vector<std::string>& labels,
                                         int taps_each, Rng& rng) {
    std::vector<std::string> script;
    script.reserve(labels.size() * static_cast<std::size_t>(taps_each));
    for (const std::string& label : labels) {
        for (int i = 0; i < taps_each; ++i) script.push_back(label);
    }
    for (std::size_t i = 0; i + 1 < script.size(); ++i) {
        std::swap(script[i], script[rng.uniform_index(i, script.size() - 1)]);
    }
    return script;
}

Dataset features_for_taps(const Trace& trace,
                          const std::vector<GroundTruthTap>& taps) {
    Dataset dataset;
    dataset.reserve(taps.size());
    for (const GroundTruthTap& tap : taps) {
        LabeledFeatures row;
        row.label = tap.key_label;
        row.features =
            extract_tap_features(trace, {tap.press_t_ns, tap.release_t_ns});
        dataset.push_back(std::move(row));
    }
    return dataset;
}

}  // namespace

Report run_experiment(const ExperimentConfig& config) {
    config.validate();
    const KeyboardLayout layout = load_layout(config.layout_path);
    const std::vector<std::string> labels = layout.labels();

    // Stratified split at the script level: every key gets train and test
    // taps in the configured proportion, in seed-shuffled order.
    const int train_each = std::max(
        1, std::min(config.taps_per_key - 1,
                    static_cast<int>(std::lround(config.train_fraction *
                                                 config.taps_per_key))));
    const int test_each = config.taps_per_key - train_each;
    Rng train_order = Rng::for_stream(config.seed, 100);
    Rng test_order = Rng::for_stream(config.seed, 101);
    const std::vector<std::string> train_script =
        balanced_script(labels, train_each, train_order);
    const std::vector<std::string> test_script =
        balanced_script(labels, test_each, test_order);

    // The attacker trains inside its own app, on undefended data.
    const SynthResult train_data = generate_trace(
        train_script, layout, config.generator, derive_seed(config.seed, 200));
    const SynthResult test_data = generate_trace(
        test_script, layout, config.generator, derive_seed(config.seed, 201));

    const Dataset train_set = features_for_taps(train_data.trace, train_data.taps);
    const ClassifierModel model = train(train_set, config.classifier, config.seed);

    Trace test_trace = test_data.trace;
    if (config.defence.clamp_enabled) {
        test_trace = apply_clamp(test_trace, config.defence.clamp);
    }
    if (config.defence.downsample_factor > 1) {
        test_trace = downsample(test_trace, config.defence.downsample_factor);
    }

    Report report;
    report.seed = config.seed;
    report.test_taps = test_data.taps.size();
    report.labels = model.labels;
    report.config_echo = config.raw.sections;

    std::vector<TapWindow> windows;
    if (config.perfect_detection) {
        windows = windows_from_ground_truth(test_data.taps);
        report.detection.matched = windows.size();
        report.detection.recall = windows.empty() ? 0.0 : 1.0;
        report.detection.false_positives = 0;
        for (std::size_t i = 0; i < windows.size(); ++i) {
            report.detection.pairs.emplace_back(i, i);
            report.detection.timing_error_ms.push_back(0.0);
        }
    } else {
        windows = detect_taps(test_trace, config.detection);
        report.detection =
            detection_metrics(test_data.taps, windows, config.match_tolerance_ms);
    }
    report.detected_windows = windows.size();

    std::map<std::string, std::size_t> label_index;
    for (std::size_t c = 0; c < model.labels.size(); ++c) {
        label_index[model.labels[c]] = c;
    }
    const std::size_t missed_col = model.labels.size();
    report.confusion.assign(model.labels.size(),
                            std::vector<std::size_t>(missed_col + 1, 0));

    std::vector<bool> tap_predicted(test_data.taps.size(), false);
    std::size_t top1_hits = 0;
    std::size_t top4_hits = 0;
    for (const auto& [window_idx, tap_idx] : report.detection.pairs) {
        const GroundTruthTap& tap = test_data.taps[tap_idx];
        AttackPrediction pred;
        try {
            pred = predict_window(test_trace, model, windows[window_idx], 4);
        } catch (const std::runtime_error&) {
            continue;  // counts as missed below
        }
        tap_predicted[tap_idx] = true;
        const std::size_t true_row = label_index.at(tap.key_label);
        report.confusion[true_row][label_index.at(pred.ranked.front())] += 1;
        if (pred.ranked.front() == tap.key_label) ++top1_hits;
        if (std::find(pred.ranked.begin(), pred.ranked.end(), tap.key_label) !=
            pred.ranked.end()) {
            ++top4_hits;
        }
    }
    for (std::size_t t = 0; t < test_data.taps.size(); ++t) {
        if (!tap_predicted[t]) {
            report.confusion[label_index.at(test_data.taps[t].key_label)]
                            [missed_col] += 1;
        }
    }
    const double denom = static_cast<double>(report.test_taps);
    report.top1_accuracy = denom > 0.0 ? top1_hits / denom : 0.0;
    report.top4_accuracy = denom > 0.0 ? top4_hits / denom : 0.0;
    return report;
}

std::string report_to_json(const Report& report) {
    nlohmann::json j;
    j["seed"] = report.seed;
    j["test_taps"] = report.test_taps;
    j["detected_windows"] = report.detected_windows;
    j["detection"]["recall"] = report.detection.recall;
    j["detection"]["matched"] = report.detection.matched;
    j["detection"]["false_positives"] = report.detection.false_positives;
    double timing_mean = 0.0, timing_max = 0.0;
    for (double e : report.detection.timing_error_ms) {
        timing_mean += e;
        timing_max = std::max(timing_max, e);
    }
    if (!report.detection.timing_error_ms.empty()) {
        timing_mean /= static_cast<double>(report.detection.timing_error_ms.size());
    }
    j["detection"]["timing_error_mean_ms"] = timing_mean;
    j["detection"]["timing_error_max_ms"] = timing_max;
    j["top1_accuracy"] = report.top1_accuracy;
    j["top4_accuracy"] = report.top4_accuracy;
    j["labels"] = report.labels;
    j["confusion"] = report.confusion;
    j["config"] = report.config_echo;
    return j.dump(2) + "\n";
}

namespace {

std::string summary_csv(std::uint64_t seed, std::size_t test_taps,
                        std::size_t detected_windows, std::size_t matched,
                        double recall, std::size_t false_positives,
                        double top1, double top4, double timing_mean,
                        double timing_max) {
    std::string out =
        "seed,test_taps,detected_windows,matched,recall,false_positives,"
        "top1_accuracy,top4_accuracy,timing_error_mean_ms,timing_error_max_ms\n";
    out += std::to_string(seed) + "," + std::to_string(test_taps) + "," +
           std::to_string(detected_windows) + "," + std::to_string(matched) +
           "," + format_double(recall) + "," + std::to_string(false_positives) +
           "," + format_double(top1) + "," + format_double(top4) + "," +
           format_double(timing_mean) + "," + format_double(timing_max) + "\n";
    return out;
}

}  // namespace

std::string report_to_csv(const Report& report) {
    double timing_mean = 0.0, timing_max = 0.0;
    for (double e : report.detection.timing_error_ms) {
        timing_mean += e;
        timing_max = std::max(timing_max, e);
    }
    if (!report.detection.timing_error_ms.empty()) {
        timing_mean /= static_cast<double>(report.detection.timing_error_ms.size());
    }
    return summary_csv(report.seed, report.test_taps, report.detected_windows,
                       report.detection.matched, report.detection.recall,
                       report.detection.false_positives, report.top1_accuracy,
                       report.top4_accuracy, timing_mean, timing_max);
}

std::string report_json_to_csv(std::string_view json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    const auto& d = j.at("detection");
    return summary_csv(j.at("seed").get<std::uint64_t>(),
                       j.at("test_taps").get<std::size_t>(),
                       j.at("detected_windows").get<std::size_t>(),
                       d.at("matched").get<std::size_t>(),
                       d.at("recall").get<double>(),
                       d.at("false_positives").get<std::size_t>(),
                       j.at("top1_accuracy").get<double>(),
                       j.at("top4_accuracy").get<double>(),
                       d.at("timing_error_mean_ms").get<double>(),
                       d.at("timing_error_max_ms").get<double>());
}

}  // namespace taptrace
