#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "taptrace/config.hpp"
#include "taptrace/detection.hpp"
#include "taptrace/sensor_model.hpp"

namespace taptrace {

/// Per-axis window summary: extreme values, their sample indices (first
/// occurrence on ties), and last-minus-first.
struct AxisFeatures {
    double max_value = 0.0;
    double min_value = 0.0;
    double max_index = 0.0;
    double min_index = 0.0;
    double last_minus_first = 0.0;

    bool operator==(const AxisFeatures&) const = default;
};

/// The ten inference features: AxisFeatures over the pitch series and the
/// roll series inside a tap window. Azimuth is ignored.
struct TapFeatureVector {
    AxisFeatures pitch;
    AxisFeatures roll;

    std::array<double, 10> flat() const;
    static TapFeatureVector from_flat(const std::array<double, 10>& values);
    bool operator==(const TapFeatureVector&) const = default;
};

AxisFeatures axis_features(std::span<const double> series);

/// Requires at least two orientation samples in [window.start, window.end).
TapFeatureVector extract_tap_features(const Trace& trace,
                                      const TapWindow& window);

struct LabeledFeatures {
    std::string label;
    TapFeatureVector features;
};
using Dataset = std::vector<LabeledFeatures>;

struct TrainParams {
    double learning_rate = 0.1;
    double l2 = 1e-3;
    int iterations = 2000;

    void validate() const;
    static TrainParams from_config(const Config& cfg,
                                   const std::string& section = "classifier");
};

/// Multinomial logistic regression over standardized features, trained by
/// full-batch gradient descent from zero-initialized parameters.
struct ClassifierModel {
    std::vector<std::string> labels;   // ascending
    std::vector<double> feature_mean;  // size 10
    std::vector<double> feature_std;   // size 10, degenerate features get 1
    std::vector<double> weights;       // labels.size() x 10, row-major
    std::vector<double> bias;          // labels.size()
    TrainParams hyper;
};

/// Cross-entropy objective used by training, exposed so gradients can be
/// checked against finite differences. Parameters pack the weight matrix
/// row-major, then the bias vector. L2 applies to weights only.
class SoftmaxObjective {
public:
    SoftmaxObjective(std::vector<double> standardized_features,
                     std::vector<std::size_t> label_indices,
                     std::size_t n_classes, std::size_t n_features, double l2);

    std::size_t param_count() const { return n_classes_ * (n_features_ + 1); }
    double loss(std::span<const double> params) const;
    std::vector<double> gradient(std::span<const double> params) const;

private:
    std::vector<double> features_;  // n_samples x n_features
    std::vector<std::size_t> labels_;
    std::size_t n_classes_;
    std::size_t n_features_;
    double l2_;
};

/// Throws on fewer than two classes. Deterministic given the seed (the seed
/// feeds initialization draws; zero init uses none).
ClassifierModel train(const Dataset& dataset, const TrainParams& params,
                      std::uint64_t seed);

/// Probabilities aligned with model.labels; sums to one within 1e-9.
std::vector<double> predict_proba(const ClassifierModel& model,
                                  const TapFeatureVector& fv);

/// Labels sorted by descending probability, ties broken by ascending label,
/// truncated at min(k, label count).
std::vector<std::string> top_k(const std::vector<std::string>& labels,
                               const std::vector<double>& probs, std::size_t k);

/// Distance-to-class-centroid baseline in standardized feature space; used
/// as an independent cross-check on the trained classifier.
struct NearestCentroid {
    std::vector<std::string> labels;
    std::vector<double> feature_mean;
    std::vector<double> feature_std;
    std::vector<double> centroids;  // labels.size() x 10
};

NearestCentroid train_nearest_centroid(const Dataset& dataset);
std::string predict_nearest(const NearestCentroid& model,
                            const TapFeatureVector& fv);

// Model file: plain text, decimal values via shortest round-trip formatting.
std::string model_to_text(const ClassifierModel& model);
ClassifierModel model_from_text(std::string_view text);
ClassifierModel load_model(const std::string& path);
void save_model(const ClassifierModel& model, const std::string& path);

// Dataset exchange: `<label>,<f1p>,...,<f5p>,<f1r>,...,<f5r>` per tap.
std::string dataset_to_text(const Dataset& dataset);
Dataset dataset_from_text(std::string_view text);

}  // namespace taptrace
