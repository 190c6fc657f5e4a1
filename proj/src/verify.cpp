#include "hilbench/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace hilbench {

VerdictProtocol VerdictProtocol::single_window(double duration_s) {
    VerdictProtocol p;
    p.stages.push_back(VerdictStage{std::nullopt, duration_s});
    return p;
}

VerdictProtocol VerdictProtocol::multi_stage(std::vector<VerdictStage> stages) {
    VerdictProtocol p;
    p.stages = std::move(stages);
    return p;
}

void VerdictProtocol::validate() const {
    if (stages.empty()) raise(Errc::InvalidArgument, "protocol has no stages");
    for (const VerdictStage& s : stages) {
        if (s.duration_s <= 0.0) raise(Errc::InvalidArgument, "stage duration must be positive");
    }
}

const char* failure_category_name(FailureCategory category) {
    switch (category) {
        case FailureCategory::CompileError: return "CompileError";
        case FailureCategory::UploadError: return "UploadError";
        case FailureCategory::NoOutput: return "NoOutput";
        case FailureCategory::FormatMismatch: return "FormatMismatch";
        case FailureCategory::AllZerosOutput: return "AllZeros";
        case FailureCategory::ScaleError: return "ScaleError";
        case FailureCategory::SignalMismatch: return "SignalMismatch";
    }
    return "SignalMismatch";
}

FailureCategory failure_category_from(const std::string& name) {
    if (name == "CompileError") return FailureCategory::CompileError;
    if (name == "UploadError") return FailureCategory::UploadError;
    if (name == "NoOutput") return FailureCategory::NoOutput;
    if (name == "FormatMismatch") return FailureCategory::FormatMismatch;
    if (name == "AllZeros") return FailureCategory::AllZerosOutput;
    if (name == "ScaleError") return FailureCategory::ScaleError;
    if (name == "SignalMismatch") return FailureCategory::SignalMismatch;
    raise(Errc::InvalidArgument, "unknown failure category '" + name + "'");
}

namespace {

double rms_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc / static_cast<double>(v.size()));
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SignalFailure classify_signal_failure(const AlignmentReport& report, const Trace& candidate,
                                      const Trace& reference, const VerifyOptions& opts) {
    bool cand_all_silent = true;
    double ref_max_rms = 0.0;
    for (const Channel& c : candidate.channels) {
        if (rms_of(c.values()) >= opts.eps_abs) cand_all_silent = false;
    }
    for (const Channel& c : reference.channels) {
        ref_max_rms = std::max(ref_max_rms, rms_of(c.values()));
    }
    if (cand_all_silent && ref_max_rms >= 10.0 * opts.eps_abs) {
        return SignalFailure{FailureCategory::AllZerosOutput, std::nullopt};
    }

    // Per-channel gain estimate: median candidate/reference ratio over the
    // aligned pairs where the reference is meaningfully nonzero.
    std::vector<double> gains;
    for (const Channel& cc : candidate.channels) {
        const Channel* rc = reference.find_channel(cc.label);
        if (!rc) continue;
        std::vector<double> cand = cc.values();
        std::vector<double> ref = rc->values();
        if (rms_of(ref) < opts.align.low_signal_rms) continue;
        auto it = report.per_channel.find(cc.label);
        if (it == report.per_channel.end()) continue;
        std::vector<double> ratios;
        for (auto [i, j] : it->second.path.pairs) {
            if (i >= cand.size() || j >= ref.size()) continue;
            if (std::abs(ref[j]) <= opts.align.eps_rel) continue;
            ratios.push_back(cand[i] / ref[j]);
        }
        if (!ratios.empty()) gains.push_back(median_of(std::move(ratios)));
    }

    if (!gains.empty()) {
        double lo = *std::min_element(gains.begin(), gains.end());
        double hi = *std::max_element(gains.begin(), gains.end());
        double scale = std::max({std::abs(lo), std::abs(hi), 1e-12});
        bool agree = (hi - lo) <= opts.scale_consensus * scale;
        double k = median_of(gains);
        if (agree && (k < opts.scale_band_lo || k > opts.scale_band_hi)) {
            return SignalFailure{FailureCategory::ScaleError, k};
        }
    }
    return SignalFailure{FailureCategory::SignalMismatch, std::nullopt};
}

namespace {

double skipped_fraction(const Trace& trace) {
    auto total_it = trace.meta.find("total_lines");
    auto skipped_it = trace.meta.find("skipped_lines");
    if (total_it == trace.meta.end() || skipped_it == trace.meta.end()) return 0.0;
    double total = std::strtod(total_it->second.c_str(), nullptr);
    double skipped = std::strtod(skipped_it->second.c_str(), nullptr);
    return total > 0.0 ? skipped / total : 0.0;
}

}  // namespace

Verdict run_verdict(const VerdictProtocol& protocol, Device& reference, Device& candidate,
                    const SerialFormat& fmt, const CalibrationProfile& cal,
                    const VerifyOptions& opts) {
    protocol.validate();
    fmt.validate();

    Verdict verdict;
    std::size_t passed_stages = 0;
    for (const VerdictStage& stage : protocol.stages) {
        if (stage.command) {
            reference.command(*stage.command);
            candidate.command(*stage.command);
        }
        std::string ref_raw = reference.capture(stage.duration_s, fmt);
        std::string cand_raw = candidate.capture(stage.duration_s, fmt);

        // The reference rig is trusted; its failures are infrastructure and
        // propagate. Candidate trouble is a measurement.
        Trace ref_trace = parse_serial(ref_raw, fmt);

        StageReport report;
        std::optional<FailureCategory> category;
        Trace cand_trace;
        try {
            cand_trace = parse_serial(cand_raw, fmt);
            report.captured = true;
        } catch (const Error& e) {
            category = e.code() == Errc::NoSamples ? FailureCategory::NoOutput
                                                   : FailureCategory::FormatMismatch;
        }
        if (!category && skipped_fraction(cand_trace) > opts.max_skipped_fraction) {
            category = FailureCategory::FormatMismatch;
        }
        if (!category) {
            try {
                report.alignment = aligned_distance(cand_trace, ref_trace, opts.align);
            } catch (const Error&) {
                category = FailureCategory::FormatMismatch;
            }
        }
        if (!category) {
            report.passed = report.alignment.aligned_euclidean <= cal.threshold_distance &&
                            report.alignment.mean_relative_deviation <= cal.threshold_relative;
            if (!report.passed) {
                SignalFailure f = classify_signal_failure(report.alignment, cand_trace,
                                                          ref_trace, opts);
                category = f.category;
                verdict.k_est = f.k_est;
            }
        }
        verdict.stages.push_back(std::move(report));
        if (category) {
            verdict.failure = category;
            if (protocol.all_must_pass) break;
        } else {
            ++passed_stages;
        }
    }

    verdict.passed = protocol.all_must_pass ? passed_stages == protocol.stages.size()
                                            : passed_stages > 0;
    if (verdict.passed) {
        verdict.failure.reset();
        verdict.k_est.reset();
    }
    return verdict;
}

}  // namespace hilbench
