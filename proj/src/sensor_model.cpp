#include "taptrace/sensor_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "taptrace/text.hpp"

namespace taptrace {

namespace {

const char* kind_name(SensorKind kind) {
    return kind == SensorKind::Accelerometer ? "ACC" : "ORI";
}

}  // namespace

double sq_sum(const SensorSample& s) {
    if (s.kind != SensorKind::Accelerometer) {
        throw std::invalid_argument("sq_sum: sample is not an accelerometer reading");
    }
    return s.v[0] * s.v[0] + s.v[1] * s.v[1] + s.v[2] * s.v[2];
}

void validate_trace(const Trace& trace) {
    if (trace.rate_acc_hz <= 0.0 || trace.rate_ori_hz <= 0.0) {
        throw std::runtime_error("trace: nominal rates must be positive");
    }
    std::int64_t last_acc = -1;
    std::int64_t last_ori = -1;
    for (const SensorSample& s : trace.samples) {
        for (double x : s.v) {
            if (!std::isfinite(x)) {
                throw std::runtime_error("trace: non-finite value at t=" +
                                         std::to_string(s.t_ns));
            }
        }
        std::int64_t& last =
            s.kind == SensorKind::Accelerometer ? last_acc : last_ori;
        if (s.t_ns < last) {
            throw std::runtime_error(
                "trace: non-monotonic timestamps for " +
                std::string(kind_name(s.kind)) + " at t=" + std::to_string(s.t_ns));
        }
        last = s.t_ns;
    }
}

std::vector<SensorSample> samples_in(const Trace& trace, SensorKind kind,
                                     std::int64_t start_ns,
                                     std::int64_t end_ns) {
    std::vector<SensorSample> out;
    for (const SensorSample& s : trace.samples) {
        if (s.kind == kind && s.t_ns >= start_ns && s.t_ns < end_ns) {
            out.push_back(s);
        }
    }
    return out;
}

std::string trace_to_text(const Trace& trace) {
    std::string out = "#rate_acc=" + format_double(trace.rate_acc_hz) +
                      ",rate_ori=" + format_double(trace.rate_ori_hz) + "\n";
    for (const SensorSample& s : trace.samples) {
        out += std::to_string(s.t_ns);
        out += ',';
        out += kind_name(s.kind);
        for (double x : s.v) {
            out += ',';
            out += format_double(x);
        }
        out += '\n';
    }
    return out;
}

Trace trace_from_text(std::string_view text) {
    Trace trace;
    bool saw_header = false;
    std::size_t line_no = 0;
    for (std::string_view raw : split(text, '\n')) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        const auto fail = [&](const std::string& what) -> std::runtime_error {
            return std::runtime_error("trace line " + std::to_string(line_no) +
                                      ": " + what);
        };
        if (line.front() == '#') {
            const auto fields = split(line.substr(1), ',');
            if (fields.size() != 2) throw fail("bad header");
            for (std::string_view field : fields) {
                const auto kv = split(field, '=');
                if (kv.size() != 2) throw fail("bad header field");
                if (kv[0] == "rate_acc") {
                    trace.rate_acc_hz = parse_double(kv[1]);
                } else if (kv[0] == "rate_ori") {
                    trace.rate_ori_hz = parse_double(kv[1]);
                } else {
                    throw fail("unknown header key '" + std::string(kv[0]) + "'");
                }
            }
            saw_header = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 5) {
            throw fail("expected 5 fields, got " + std::to_string(fields.size()));
        }
        SensorSample s;
        try {
            s.t_ns = parse_int64(fields[0]);
            if (fields[1] == "ACC") {
                s.kind = SensorKind::Accelerometer;
            } else if (fields[1] == "ORI") {
                s.kind = SensorKind::Orientation;
            } else {
                throw std::runtime_error("unknown sensor kind '" +
                                         std::string(fields[1]) + "'");
            }
            for (int i = 0; i < 3; ++i) s.v[i] = parse_double(fields[2 + i]);
        } catch (const std::runtime_error& err) {
            throw fail(err.what());
        }
        if (s.t_ns < 0) throw fail("negative timestamp");
        trace.samples.push_back(s);
    }
    if (!saw_header) {
        throw std::runtime_error("trace: missing #rate_acc=...,rate_ori=... header");
    }
    validate_trace(trace);
    return trace;
}

Trace read_trace(const std::string& path) {
    return trace_from_text(read_file(path));
}

void write_trace(const Trace& trace, const std::string& path) {
    write_file(path, trace_to_text(trace));
}

std::string ground_truth_to_text(const std::vector<GroundTruthTap>& taps) {
    std::string out;
    for (const GroundTruthTap& tap : taps) {
        out += tap.key_label;
        out += ',';
        out += std::to_string(tap.press_t_ns);
        out += ',';
        out += std::to_string(tap.release_t_ns);
        out += ',';
        out += format_double(tap.cx);
        out += ',';
        out += format_double(tap.cy);
        out += '\n';
    }
    return out;
}

std::vector<GroundTruthTap> ground_truth_from_text(std::string_view text) {
    std::vector<GroundTruthTap> taps;
    std::size_t line_no = 0;
    for (std::string_view raw : split(text, '\n')) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split(line, ',');
        if (fields.size() != 5) {
            throw std::runtime_error("ground truth line " + std::to_string(line_no) +
                                     ": expected 5 fields");
        }
        GroundTruthTap tap;
        tap.key_label = std::string(fields[0]);
        tap.press_t_ns = parse_int64(fields[1]);
        tap.release_t_ns = parse_int64(fields[2]);
        tap.cx = parse_double(fields[3]);
        tap.cy = parse_double(fields[4]);
        if (tap.press_t_ns >= tap.release_t_ns) {
            throw std::runtime_error("ground truth line " + std::to_string(line_no) +
                                     ": press_t must precede release_t");
        }
        taps.push_back(std::move(tap));
    }
    return taps;
}

std::vector<GroundTruthTap> read_ground_truth(const std::string& path) {
    return ground_truth_from_text(read_file(path));
}

void write_ground_truth(const std::vector<GroundTruthTap>& taps,
                        const std::string& path) {
    write_file(path, ground_truth_to_text(taps));
}

}  // namespace taptrace
