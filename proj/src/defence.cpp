#include "taptrace/defence.hpp"

#include <cmath>
#include <stdexcept>

namespace taptrace {

void ClampParams::validate() const {
    if (!(0.0 < band_lo && band_lo < target_sq && target_sq < band_hi)) {
        throw std::invalid_argument(
            "defence: need 0 < band_lo < target_sq < band_hi");
    }
}

ClampParams ClampParams::from_config(const Config& cfg,
                                     const std::string& section) {
    ClampParams p;
    p.band_lo = cfg.get_double(section, "band_lo", p.band_lo);
    p.band_hi = cfg.get_double(section, "band_hi", p.band_hi);
    p.target_sq = cfg.get_double(section, "target_sq", p.target_sq);
    p.validate();
    return p;
}

SensorSample clamp_filter(const SensorSample& s, const ClampParams& params) {
    params.validate();
    for (double x : s.v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("clamp_filter: non-finite component");
        }
    }
    const double sq = sq_sum(s);  // also rejects orientation samples
    if (!(sq > params.band_lo && sq < params.band_hi)) return s;
    if (std::abs(sq - params.target_sq) <= 1e-12 * params.target_sq) return s;
    const double scale = std::sqrt(params.target_sq / sq);
    SensorSample out = s;
    for (double& x : out.v) x *= scale;
    return out;
}

Trace apply_clamp(const Trace& trace, const ClampParams& params) {
    params.validate();
    Trace out = trace;
    for (SensorSample& s : out.samples) {
        if (s.kind == SensorKind::Accelerometer) s = clamp_filter(s, params);
    }
    return out;
}

Trace downsample(const Trace& trace, int factor) {
    if (factor < 1) {
        throw std::invalid_argument("downsample: factor must be >= 1");
    }
    if (factor == 1) return trace;
    Trace out;
    out.rate_acc_hz = trace.rate_acc_hz / factor;
    out.rate_ori_hz = trace.rate_ori_hz / factor;
    std::size_t index_acc = 0;
    std::size_t index_ori = 0;
    for (const SensorSample& s : trace.samples) {
        std::size_t& index =
            s.kind == SensorKind::Accelerometer ? index_acc : index_ori;
        if (index % static_cast<std::size_t>(factor) == 0) out.samples.push_back(s);
        ++index;
    }
    return out;
}

}  // namespace taptrace
