#include "taptrace/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "taptrace/rng.hpp"

namespace taptrace {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct TapPlan {
    std::int64_t start_ns = 0;
    std::int64_t end_ns = 0;
    double peak_sq = 0.0;      // SqSum at the excursion peak
    double pitch_amp = 0.0;    // degrees
    double roll_amp = 0.0;     // degrees
    double bump_phase = 0.0;   // window fraction of the orientation peak
};

std::int64_t ms_to_ns(double ms) {
    return static_cast<std::int64_t>(std::llround(ms * 1e6));
}

std::int64_t sample_time_ns(std::size_t index, double rate_hz) {
    return static_cast<std::int64_t>(
        std::llround(static_cast<double>(index) * 1e9 / rate_hz));
}

}  // namespace

void GeneratorParams::validate() const {
    if (base_gravity <= 0.0) throw std::invalid_argument("generator: base_gravity must be positive");
    if (acc_noise_sigma < 0.0 || ori_noise_sigma < 0.0) {
        throw std::invalid_argument("generator: noise sigmas must be non-negative");
    }
    if (!(0.0 < tap_duration_ms_min && tap_duration_ms_min <= tap_duration_ms_max)) {
        throw std::invalid_argument("generator: bad tap duration range");
    }
    const double gravity_sq = base_gravity * base_gravity;
    if (!(normal_peak_lo < gravity_sq && gravity_sq < normal_peak_hi)) {
        throw std::invalid_argument(
            "generator: normal peak band must straddle base_gravity^2");
    }
    if (forceful_fraction < 0.0 || forceful_fraction > 1.0) {
        throw std::invalid_argument("generator: forceful_fraction must be in [0, 1]");
    }
    if (forceful_peak_min <= normal_peak_hi) {
        throw std::invalid_argument(
            "generator: forceful_peak_min must exceed the normal peak band");
    }
    if (forceful_peak_span < 0.0) {
        throw std::invalid_argument("generator: forceful_peak_span must be non-negative");
    }
    if (rate_acc_hz <= 0.0 || rate_ori_hz <= 0.0) {
        throw std::invalid_argument("generator: sensor rates must be positive");
    }
    if (!(0.0 < inter_tap_gap_ms_min && inter_tap_gap_ms_min <= inter_tap_gap_ms_max)) {
        throw std::invalid_argument("generator: bad inter-tap gap range");
    }
    if (bump_width <= 0.0) throw std::invalid_argument("generator: bump_width must be positive");
}

GeneratorParams GeneratorParams::from_config(const Config& cfg,
                                             const std::string& section) {
    GeneratorParams p;
    p.base_gravity = cfg.get_double(section, "base_gravity", p.base_gravity);
    p.acc_noise_sigma = cfg.get_double(section, "acc_noise_sigma", p.acc_noise_sigma);
    p.ori_noise_sigma = cfg.get_double(section, "ori_noise_sigma", p.ori_noise_sigma);
    p.tap_duration_ms_min = cfg.get_double(section, "tap_duration_ms_min", p.tap_duration_ms_min);
    p.tap_duration_ms_max = cfg.get_double(section, "tap_duration_ms_max", p.tap_duration_ms_max);
    p.normal_peak_lo = cfg.get_double(section, "normal_peak_lo", p.normal_peak_lo);
    p.normal_peak_hi = cfg.get_double(section, "normal_peak_hi", p.normal_peak_hi);
    p.forceful_fraction = cfg.get_double(section, "forceful_fraction", p.forceful_fraction);
    p.forceful_peak_min = cfg.get_double(section, "forceful_peak_min", p.forceful_peak_min);
    p.forceful_peak_span = cfg.get_double(section, "forceful_peak_span", p.forceful_peak_span);
    p.pitch_gain_deg = cfg.get_double(section, "pitch_gain_deg", p.pitch_gain_deg);
    p.roll_gain_deg = cfg.get_double(section, "roll_gain_deg", p.roll_gain_deg);
    p.peak_phase_base = cfg.get_double(section, "peak_phase_base", p.peak_phase_base);
    p.peak_phase_span = cfg.get_double(section, "peak_phase_span", p.peak_phase_span);
    p.bump_width = cfg.get_double(section, "bump_width", p.bump_width);
    p.rate_acc_hz = cfg.get_double(section, "rate_acc_hz", p.rate_acc_hz);
    p.rate_ori_hz = cfg.get_double(section, "rate_ori_hz", p.rate_ori_hz);
    p.inter_tap_gap_ms_min = cfg.get_double(section, "inter_tap_gap_ms_min", p.inter_tap_gap_ms_min);
    p.inter_tap_gap_ms_max = cfg.get_double(section, "inter_tap_gap_ms_max", p.inter_tap_gap_ms_max);
    p.validate();
    return p;
}

std::vector<std::string> script_from_string(std::string_view chars) {
    std::vector<std::string> script;
    script.reserve(chars.size());
    for (char c : chars) script.emplace_back(1, c);
    return script;
}

SynthResult generate_trace(const std::vector<std::string>& script,
                           const KeyboardLayout& layout,
                           const GeneratorParams& params, std::uint64_t seed) {
    params.validate();
    const std::size_t n_slots = layout.key_count();
    const double layout_w = layout.width();
    const double layout_h = layout.height();
    const double gravity_sq = params.base_gravity * params.base_gravity;

    // Draw order is fixed: the full tap schedule first (stream 0), then
    // accelerometer noise (stream 1), then orientation noise (stream 2).
    Rng schedule_rng = Rng::for_stream(seed, 0);
    std::vector<TapPlan> plans;
    std::vector<GroundTruthTap> taps;
    plans.reserve(script.size());
    taps.reserve(script.size());
    double cursor_ms = 0.0;
    for (const std::string& label : script) {
        const auto slot = layout.slot_of_label(label);
        if (!slot) {
            throw std::runtime_error("generate_trace: unknown key label '" + label +
                                     "'");
        }
        const Key& key = layout.key_at_slot(*slot);

        const double gap_ms = schedule_rng.uniform(params.inter_tap_gap_ms_min,
                                                   params.inter_tap_gap_ms_max);
        const double dur_ms = schedule_rng.uniform(params.tap_duration_ms_min,
                                                   params.tap_duration_ms_max);
        const bool forceful = schedule_rng.bernoulli(params.forceful_fraction);
        const double peak_sq =
            forceful ? schedule_rng.uniform(params.forceful_peak_min,
                                            params.forceful_peak_min +
                                                params.forceful_peak_span)
                     : schedule_rng.uniform(params.normal_peak_lo,
                                            params.normal_peak_hi);
        const double press_x =
            schedule_rng.uniform(key.x + 0.1 * key.w, key.x + 0.9 * key.w);
        const double press_y =
            schedule_rng.uniform(key.y + 0.1 * key.h, key.y + 0.9 * key.h);

        TapPlan plan;
        plan.start_ns = ms_to_ns(cursor_ms + gap_ms);
        plan.end_ns = ms_to_ns(cursor_ms + gap_ms + dur_ms);
        plan.peak_sq = peak_sq;
        const double nx = (key.center_x() - layout_w / 2.0) / layout_w;
        const double ny = (key.center_y() - layout_h / 2.0) / layout_h;
        plan.pitch_amp = params.pitch_gain_deg * ny;
        plan.roll_amp = params.roll_gain_deg * nx;
        plan.bump_phase =
            n_slots > 1 ? params.peak_phase_base +
                              params.peak_phase_span *
                                  (static_cast<double>(*slot) /
                                   static_cast<double>(n_slots - 1))
                        : params.peak_phase_base;
        plans.push_back(plan);

        GroundTruthTap tap;
        tap.key_label = label;
        tap.press_t_ns = plan.start_ns;
        tap.release_t_ns = plan.end_ns;
        tap.cx = press_x;
        tap.cy = press_y;
        taps.push_back(std::move(tap));

        cursor_ms += gap_ms + dur_ms;
    }
    const double tail_ms = schedule_rng.uniform(params.inter_tap_gap_ms_min,
                                                params.inter_tap_gap_ms_max);
    const std::int64_t total_ns = ms_to_ns(cursor_ms + tail_ms);

    const auto active_plan = [&plans](std::int64_t t_ns,
                                      std::size_t& hint) -> const TapPlan* {
        while (hint < plans.size() && plans[hint].end_ns <= t_ns) ++hint;
        if (hint < plans.size() && plans[hint].start_ns <= t_ns) return &plans[hint];
        return nullptr;
    };

    Trace trace;
    trace.rate_acc_hz = params.rate_acc_hz;
    trace.rate_ori_hz = params.rate_ori_hz;

    std::vector<SensorSample> acc_samples;
    {
        Rng noise = Rng::for_stream(seed, 1);
        std::size_t hint = 0;
        for (std::size_t i = 0;; ++i) {
            const std::int64_t t = sample_time_ns(i, params.rate_acc_hz);
            if (t >= total_ns) break;
            SensorSample s;
            s.t_ns = t;
            s.kind = SensorKind::Accelerometer;
            double az = params.base_gravity;
            if (const TapPlan* plan = active_plan(t, hint)) {
                const double u = static_cast<double>(t - plan->start_ns) /
                                 static_cast<double>(plan->end_ns - plan->start_ns);
                const double sq =
                    gravity_sq + (plan->peak_sq - gravity_sq) * std::sin(kPi * u);
                az = std::sqrt(sq);
            }
            s.v = {0.0, 0.0, az};
            if (params.acc_noise_sigma > 0.0) {
                for (double& x : s.v) x += noise.normal(0.0, params.acc_noise_sigma);
            }
            acc_samples.push_back(s);
        }
    }

    std::vector<SensorSample> ori_samples;
    {
        Rng noise = Rng::for_stream(seed, 2);
        std::size_t hint = 0;
        for (std::size_t i = 0;; ++i) {
            const std::int64_t t = sample_time_ns(i, params.rate_ori_hz);
            if (t >= total_ns) break;
            SensorSample s;
            s.t_ns = t;
            s.kind = SensorKind::Orientation;
            double pitch = 0.0;
            double roll = 0.0;
            if (const TapPlan* plan = active_plan(t, hint)) {
                const double u = static_cast<double>(t - plan->start_ns) /
                                 static_cast<double>(plan->end_ns - plan->start_ns);
                const double b = (u - plan->bump_phase) / params.bump_width;
                const double bump = std::exp(-0.5 * b * b);
                pitch = plan->pitch_amp * bump;
                roll = plan->roll_amp * bump;
            }
            s.v = {0.0, pitch, roll};
            if (params.ori_noise_sigma > 0.0) {
                for (double& x : s.v) x += noise.normal(0.0, params.ori_noise_sigma);
            }
            ori_samples.push_back(s);
        }
    }

    trace.samples.reserve(acc_samples.size() + ori_samples.size());
    std::merge(acc_samples.begin(), acc_samples.end(), ori_samples.begin(),
               ori_samples.end(), std::back_inserter(trace.samples),
               [](const SensorSample& a, const SensorSample& b) {
                   if (a.t_ns != b.t_ns) return a.t_ns < b.t_ns;
                   return a.kind < b.kind;
               });
    return {std::move(trace), std::move(taps)};
}

}  // namespace taptrace
