#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hilbench/align.hpp"
#include "hilbench/simbench.hpp"

namespace hilbench {

struct VerdictStage {
    std::optional<StimulusCommand> command;  // sent to both devices before capture
    double duration_s = 10.0;
};

struct VerdictProtocol {
    std::vector<VerdictStage> stages;
    bool all_must_pass = true;

    static VerdictProtocol single_window(double duration_s);
    static VerdictProtocol multi_stage(std::vector<VerdictStage> stages);
    void validate() const;
};

enum class FailureCategory {
    CompileError,
    UploadError,
    NoOutput,
    FormatMismatch,
    AllZerosOutput,
    ScaleError,
    SignalMismatch,
};

const char* failure_category_name(FailureCategory category);
FailureCategory failure_category_from(const std::string& name);

struct VerifyOptions {
    AlignOptions align;
    double eps_abs = 1e-3;              // below this RMS a channel counts as silent
    double max_skipped_fraction = 0.2;  // unparseable-line budget before FormatMismatch
    double scale_band_lo = 0.9;         // gain inside [lo, hi] is not a scale error
    double scale_band_hi = 1.1;
    double scale_consensus = 0.05;      // channel gain estimates must agree this tightly
};

struct SignalFailure {
    FailureCategory category = FailureCategory::SignalMismatch;
    std::optional<double> k_est;  // ScaleError only
};

// Decides why an already-failing stage failed. Channels quieter than
// low_signal_rms on the reference side carry no gain information and do not
// vote on the scale consensus.
SignalFailure classify_signal_failure(const AlignmentReport& report, const Trace& candidate,
                                      const Trace& reference, const VerifyOptions& opts = {});

struct StageReport {
    bool passed = false;
    bool captured = false;  // false when the candidate produced nothing usable
    AlignmentReport alignment;
};

struct Verdict {
    bool passed = false;
    std::vector<StageReport> stages;
    std::optional<FailureCategory> failure;
    std::optional<double> k_est;
};

// Drives both devices through the protocol. A stage passes when the worst
// channel is inside both calibrated thresholds; the first failing stage
// short-circuits the rest. Candidate capture/parse problems become NoOutput
// or FormatMismatch instead of exceptions.
Verdict run_verdict(const VerdictProtocol& protocol, Device& reference, Device& candidate,
                    const SerialFormat& fmt, const CalibrationProfile& cal,
                    const VerifyOptions& opts = {});

}  // namespace hilbench
