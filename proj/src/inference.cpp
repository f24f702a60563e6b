#include "taptrace/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "taptrace/text.hpp"

namespace taptrace {

std::array<double, 10> TapFeatureVector::flat() const {
    return {pitch.max_value, pitch.min_value, pitch.max_index, pitch.min_index,
            pitch.last_minus_first, roll.max_value, roll.min_value,
            roll.max_index, roll.min_index, roll.last_minus_first};
}

TapFeatureVector TapFeatureVector::from_flat(const std::array<double, 10>& f) {
    TapFeatureVector fv;
    fv.pitch = {f[0], f[1], f[2], f[3], f[4]};
    fv.roll = {f[5], f[6], f[7], f[8], f[9]};
    return fv;
}

AxisFeatures axis_features(std::span<const double> series) {
    if (series.size() < 2) {
        throw std::invalid_argument("axis_features: need at least 2 samples");
    }
    AxisFeatures f;
    f.max_value = f.min_value = series[0];
    f.max_index = f.min_index = 0.0;
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series[i] > f.max_value) {
            f.max_value = series[i];
            f.max_index = static_cast<double>(i);
        }
        if (series[i] < f.min_value) {
            f.min_value = series[i];
            f.min_index = static_cast<double>(i);
        }
    }
    f.last_minus_first = series.back() - series.front();
    return f;
}

TapFeatureVector extract_tap_features(const Trace& trace,
                                      const TapWindow& window) {
    std::vector<double> pitch, roll;
    for (const SensorSample& s : trace.samples) {
        if (s.kind != SensorKind::Orientation) continue;
        if (s.t_ns < window.start_ns || s.t_ns >= window.end_ns) continue;
        pitch.push_back(s.v[1]);
        roll.push_back(s.v[2]);
    }
    if (pitch.size() < 2) {
        throw std::runtime_error(
            "extract_tap_features: fewer than 2 orientation samples in window");
    }
    TapFeatureVector fv;
    fv.pitch = axis_features(pitch);
    fv.roll = axis_features(roll);
    return fv;
}

void TrainParams::validate() const {
    if (learning_rate <= 0.0) throw std::invalid_argument("classifier: learning_rate must be positive");
    if (l2 < 0.0) throw std::invalid_argument("classifier: l2 must be non-negative");
    if (iterations < 1) throw std::invalid_argument("classifier: iterations must be >= 1");
}

TrainParams TrainParams::from_config(const Config& cfg,
                                     const std::string& section) {
    TrainParams p;
    p.learning_rate = cfg.get_double(section, "learning_rate", p.learning_rate);
    p.l2 = cfg.get_double(section, "l2", p.l2);
    p.iterations = static_cast<int>(cfg.get_int(section, "iterations", p.iterations));
    p.validate();
    return p;
}

SoftmaxObjective::SoftmaxObjective(std::vector<double> standardized_features,
                                   std::vector<std::size_t> label_indices,
                                   std::size_t n_classes,
                                   std::size_t n_features, double l2)
    : features_(std::move(standardized_features)),
      labels_(std::move(label_indices)),
      n_classes_(n_classes),
      n_features_(n_features),
      l2_(l2) {
    if (labels_.empty() || features_.size() != labels_.size() * n_features_) {
        throw std::invalid_argument("objective: feature/label size mismatch");
    }
}

namespace {

// Row of class probabilities for one sample; max-subtracted softmax.
void softmax_row(std::span<const double> params, std::span<const double> x,
                 std::size_t n_classes, std::size_t n_features,
                 std::vector<double>& out) {
    out.resize(n_classes);
    double max_logit = -1e300;
    for (std::size_t c = 0; c < n_classes; ++c) {
        double logit = params[n_classes * n_features + c];  // bias
        const std::size_t row = c * n_features;
        for (std::size_t d = 0; d < n_features; ++d) {
            logit += params[row + d] * x[d];
        }
        out[c] = logit;
        max_logit = std::max(max_logit, logit);
    }
    double sum = 0.0;
    for (double& p : out) {
        p = std::exp(p - max_logit);
        sum += p;
    }
    for (double& p : out) p /= sum;
}

}  // namespace

double SoftmaxObjective::loss(std::span<const double> params) const {
    const std::size_t n = labels_.size();
    std::vector<double> probs;
    double nll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::span<const double> x(features_.data() + i * n_features_,
                                        n_features_);
        softmax_row(params, x, n_classes_, n_features_, probs);
        nll -= std::log(std::max(probs[labels_[i]], 1e-300));
    }
    double reg = 0.0;
    for (std::size_t k = 0; k < n_classes_ * n_features_; ++k) {
        reg += params[k] * params[k];
    }
    return nll / static_cast<double>(n) + 0.5 * l2_ * reg;
}

std::vector<double> SoftmaxObjective::gradient(
    std::span<const double> params) const {
    const std::size_t n = labels_.size();
    std::vector<double> grad(param_count(), 0.0);
    std::vector<double> probs;
    for (std::size_t i = 0; i < n; ++i) {
        const std::span<const double> x(features_.data() + i * n_features_,
                                        n_features_);
        softmax_row(params, x, n_classes_, n_features_, probs);
        for (std::size_t c = 0; c < n_classes_; ++c) {
            const double delta = probs[c] - (labels_[i] == c ? 1.0 : 0.0);
            const std::size_t row = c * n_features_;
            for (std::size_t d = 0; d < n_features_; ++d) {
                grad[row + d] += delta * x[d];
            }
            grad[n_classes_ * n_features_ + c] += delta;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& g : grad) g *= inv_n;
    for (std::size_t k = 0; k < n_classes_ * n_features_; ++k) {
        grad[k] += l2_ * params[k];
    }
    return grad;
}

namespace {

constexpr std::size_t kFeatureCount = 10;

void standardize(std::span<const double> mean, std::span<const double> std,
                 const TapFeatureVector& fv, std::vector<double>& out) {
    const auto flat = fv.flat();
    out.resize(kFeatureCount);
    for (std::size_t d = 0; d < kFeatureCount; ++d) {
        if (!std::isfinite(flat[d])) {
            throw std::invalid_argument("classifier: non-finite feature value");
        }
        out[d] = (flat[d] - mean[d]) / std[d];
    }
}

}  // namespace

ClassifierModel train(const Dataset& dataset, const TrainParams& params,
                      std::uint64_t seed) {
    (void)seed;  // zero init draws nothing; kept for interface stability
    params.validate();
    if (dataset.empty()) {
        throw std::runtime_error("train: empty dataset");
    }
    std::set<std::string> label_set;
    for (const LabeledFeatures& row : dataset) label_set.insert(row.label);
    if (label_set.size() < 2) {
        throw std::runtime_error("train: need at least 2 classes, got " +
                                 std::to_string(label_set.size()));
    }
    ClassifierModel model;
    model.labels.assign(label_set.begin(), label_set.end());
    model.hyper = params;
    const std::size_t n_classes = model.labels.size();
    const std::size_t n = dataset.size();

    std::map<std::string, std::size_t> label_index;
    for (std::size_t c = 0; c < n_classes; ++c) label_index[model.labels[c]] = c;

    model.feature_mean.assign(kFeatureCount, 0.0);
    model.feature_std.assign(kFeatureCount, 0.0);
    for (const LabeledFeatures& row : dataset) {
        const auto flat = row.features.flat();
        for (std::size_t d = 0; d < kFeatureCount; ++d) {
            if (!std::isfinite(flat[d])) {
                throw std::invalid_argument("train: non-finite feature value");
            }
            model.feature_mean[d] += flat[d];
        }
    }
    for (double& m : model.feature_mean) m /= static_cast<double>(n);
    for (const LabeledFeatures& row : dataset) {
        const auto flat = row.features.flat();
        for (std::size_t d = 0; d < kFeatureCount; ++d) {
            const double delta = flat[d] - model.feature_mean[d];
            model.feature_std[d] += delta * delta;
        }
    }
    for (double& s : model.feature_std) {
        s = std::sqrt(s / static_cast<double>(n));
        if (s <= 0.0) s = 1.0;  // degenerate feature
    }

    std::vector<double> features(n * kFeatureCount);
    std::vector<std::size_t> labels(n);
    std::vector<double> buf;
    for (std::size_t i = 0; i < n; ++i) {
        standardize(model.feature_mean, model.feature_std, dataset[i].features,
                    buf);
        std::copy(buf.begin(), buf.end(), features.begin() + i * kFeatureCount);
        labels[i] = label_index.at(dataset[i].label);
    }

    const SoftmaxObjective objective(std::move(features), std::move(labels),
                                     n_classes, kFeatureCount, params.l2);
    std::vector<double> theta(objective.param_count(), 0.0);
    for (int it = 0; it < params.iterations; ++it) {
        const std::vector<double> grad = objective.gradient(theta);
        for (std::size_t k = 0; k < theta.size(); ++k) {
            theta[k] -= params.learning_rate * grad[k];
        }
    }
    model.weights.assign(theta.begin(),
                         theta.begin() + static_cast<std::ptrdiff_t>(
                                             n_classes * kFeatureCount));
    model.bias.assign(theta.begin() + static_cast<std::ptrdiff_t>(
                                          n_classes * kFeatureCount),
                      theta.end());
    return model;
}

std::vector<double> predict_proba(const ClassifierModel& model,
                                  const TapFeatureVector& fv) {
    const std::size_t n_classes = model.labels.size();
    std::vector<double> z;
    standardize(model.feature_mean, model.feature_std, fv, z);
    std::vector<double> params(model.weights);
    params.insert(params.end(), model.bias.begin(), model.bias.end());
    std::vector<double> probs;
    softmax_row(params, z, n_classes, kFeatureCount, probs);
    return probs;
}

std::vector<std::string> top_k(const std::vector<std::string>& labels,
                               const std::vector<double>& probs,
                               std::size_t k) {
    if (k < 1) throw std::invalid_argument("top_k: k must be >= 1");
    if (labels.size() != probs.size()) {
        throw std::invalid_argument("top_k: label/probability size mismatch");
    }
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (probs[a] != probs[b]) return probs[a] > probs[b];
        return labels[a] < labels[b];
    });
    std::vector<std::string> out;
    const std::size_t take = std::min(k, labels.size());
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(labels[order[i]]);
    return out;
}

NearestCentroid train_nearest_centroid(const Dataset& dataset) {
    if (dataset.empty()) throw std::runtime_error("nearest_centroid: empty dataset");
    std::set<std::string> label_set;
    for (const LabeledFeatures& row : dataset) label_set.insert(row.label);
    NearestCentroid model;
    model.labels.assign(label_set.begin(), label_set.end());

    model.feature_mean.assign(kFeatureCount, 0.0);
    model.feature_std.assign(kFeatureCount, 0.0);
    for (const LabeledFeatures& row : dataset) {
        const auto flat = row.features.flat();
        for (std::size_t d = 0; d < kFeatureCount; ++d) model.feature_mean[d] += flat[d];
    }
    for (double& m : model.feature_mean) m /= static_cast<double>(dataset.size());
    for (const LabeledFeatures& row : dataset) {
        const auto flat = row.features.flat();
        for (std::size_t d = 0; d < kFeatureCount; ++d) {
            const double delta = flat[d] - model.feature_mean[d];
            model.feature_std[d] += delta * delta;
        }
    }
    for (double& s : model.feature_std) {
        s = std::sqrt(s / static_cast<double>(dataset.size()));
        if (s <= 0.0) s = 1.0;
    }

    std::map<std::string, std::size_t> label_index;
    for (std::size_t c = 0; c < model.labels.size(); ++c) {
        label_index[model.labels[c]] = c;
    }
    model.centroids.assign(model.labels.size() * kFeatureCount, 0.0);
    std::vector<std::size_t> counts(model.labels.size(), 0);
    std::vector<double> z;
    for (const LabeledFeatures& row : dataset) {
        standardize(model.feature_mean, model.feature_std, row.features, z);
        const std::size_t c = label_index.at(row.label);
        for (std::size_t d = 0; d < kFeatureCount; ++d) {
            model.centroids[c * kFeatureCount + d] += z[d];
        }
        ++counts[c];
    }
    for (std::size_t c = 0; c < model.labels.size(); ++c) {
        for (std::size_t d = 0; d < kFeatureCount; ++d) {
            model.centroids[c * kFeatureCount + d] /= static_cast<double>(counts[c]);
        }
    }
    return model;
}

std::string predict_nearest(const NearestCentroid& model,
                            const TapFeatureVector& fv) {
    std::vector<double> z;
    standardize(model.feature_mean, model.feature_std, fv, z);
    std::size_t best = 0;
    double best_dist = 1e300;
    for (std::size_t c = 0; c < model.labels.size(); ++c) {
        double dist = 0.0;
        for (std::size_t d = 0; d < kFeatureCount; ++d) {
            const double delta = z[d] - model.centroids[c * kFeatureCount + d];
            dist += delta * delta;
        }
        if (dist < best_dist) {
            best_dist = dist;
            best = c;
        }
    }
    return model.labels[best];
}

std::string model_to_text(const ClassifierModel& model) {
    std::string out = "labels " + std::to_string(model.labels.size()) + "\n";
    for (const std::string& label : model.labels) out += label + "\n";
    const auto emit_vector = [&out](const std::string& name,
                                    const std::vector<double>& values) {
        out += name;
        for (double v : values) {
            out += ' ';
            out += format_double(v);
        }
        out += '\n';
    };
    emit_vector("mean", model.feature_mean);
    emit_vector("std", model.feature_std);
    for (std::size_t c = 0; c < model.labels.size(); ++c) {
        std::vector<double> row(
            model.weights.begin() + static_cast<std::ptrdiff_t>(c * kFeatureCount),
            model.weights.begin() +
                static_cast<std::ptrdiff_t>((c + 1) * kFeatureCount));
        emit_vector("weights", row);
    }
    emit_vector("bias", model.bias);
    out += "hyper " + format_double(model.hyper.learning_rate) + " " +
           format_double(model.hyper.l2) + " " +
           std::to_string(model.hyper.iterations) + "\n";
    return out;
}

ClassifierModel model_from_text(std::string_view text) {
    std::vector<std::string_view> lines = split(text, '\n');
    std::size_t pos = 0;
    const auto next_line = [&]() -> std::string_view {
        while (pos < lines.size() && trim(lines[pos]).empty()) ++pos;
        if (pos >= lines.size()) throw std::runtime_error("model file: truncated");
        return trim(lines[pos++]);
    };
    const auto parse_vector = [](std::string_view line, std::string_view name,
                                 std::size_t expect) {
        const auto fields = split(line, ' ');
        if (fields.empty() || fields[0] != name || fields.size() != expect + 1) {
            throw std::runtime_error("model file: expected '" + std::string(name) +
                                     "' row with " + std::to_string(expect) +
                                     " values");
        }
        std::vector<double> values;
        values.reserve(expect);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            values.push_back(parse_double(fields[i]));
        }
        return values;
    };

    const auto header = split(next_line(), ' ');
    if (header.size() != 2 || header[0] != "labels") {
        throw std::runtime_error("model file: expected 'labels <count>' header");
    }
    const std::size_t n_classes =
        static_cast<std::size_t>(parse_int64(header[1]));
    ClassifierModel model;
    for (std::size_t c = 0; c < n_classes; ++c) {
        model.labels.emplace_back(next_line());
    }
    model.feature_mean = parse_vector(next_line(), "mean", kFeatureCount);
    model.feature_std = parse_vector(next_line(), "std", kFeatureCount);
    for (std::size_t c = 0; c < n_classes; ++c) {
        const auto row = parse_vector(next_line(), "weights", kFeatureCount);
        model.weights.insert(model.weights.end(), row.begin(), row.end());
    }
    model.bias = parse_vector(next_line(), "bias", n_classes);
    const auto hyper = split(next_line(), ' ');
    if (hyper.size() != 4 || hyper[0] != "hyper") {
        throw std::runtime_error("model file: expected 'hyper lr l2 iterations'");
    }
    model.hyper.learning_rate = parse_double(hyper[1]);
    model.hyper.l2 = parse_double(hyper[2]);
    model.hyper.iterations = static_cast<int>(parse_int64(hyper[3]));
    return model;
}

ClassifierModel load_model(const std::string& path) {
    return model_from_text(read_file(path));
}

void save_model(const ClassifierModel& model, const std::string& path) {
    write_file(path, model_to_text(model));
}

std::string dataset_to_text(const Dataset& dataset) {
    std::string out;
    for (const LabeledFeatures& row : dataset) {
        out += row.label;
        for (double v : row.features.flat()) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

Dataset dataset_from_text(std::string_view text) {
    Dataset dataset;
    std::size_t line_no = 0;
    for (std::string_view raw : split(text, '\n')) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split(line, ',');
        if (fields.size() != 11) {
            throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                     ": expected label + 10 features");
        }
        LabeledFeatures row;
        row.label = std::string(fields[0]);
        std::array<double, 10> flat{};
        for (std::size_t d = 0; d < 10; ++d) flat[d] = parse_double(fields[d + 1]);
        row.features = TapFeatureVector::from_flat(flat);
        dataset.push_back(std::move(row));
    }
    return dataset;
}

}  // namespace taptrace
