#include <doctest/doctest.h>

#include <string>
#include <vector>

#include "hilbench/error.hpp"
#include "hilbench/verify.hpp"

using namespace hilbench;

namespace {

SerialFormat unlabeled(double period = 0.1) {
    SerialFormat fmt;
    fmt.kind = SerialKind::UnlabeledLines;
    fmt.sample_period = period;
    return fmt;
}

SerialFormat imu_format(double period = 0.1) {
    SerialFormat fmt;
    fmt.kind = SerialKind::LabeledLines;
    fmt.labels = {"A_X", "A_Y", "A_Z"};
    fmt.sample_period = period;
    return fmt;
}

CalibrationProfile make_calibration(SimConfig base, const SerialFormat& fmt, double duration,
                                    int n_pairs = 5) {
    std::vector<std::pair<Trace, Trace>> pairs;
    for (int k = 0; k < n_pairs; ++k) {
        SimConfig a = base;
        a.seed = 1000 + 2 * static_cast<std::uint64_t>(k);
        SimConfig b = base;
        b.seed = 1001 + 2 * static_cast<std::uint64_t>(k);
        SimulatedDevice da(a), db(b);
        Lease la = da.lease("cal-a");
        Lease lb = db.lease("cal-b");
        pairs.emplace_back(parse_serial(da.capture(duration, fmt), fmt),
                           parse_serial(db.capture(duration, fmt), fmt));
    }
    return calibrate(pairs);
}

Verdict run_with_fault(SimConfig ref_cfg, FaultProfile fault, double fault_from,
                       const SerialFormat& fmt, const VerdictProtocol& protocol,
                       const CalibrationProfile& cal) {
    SimConfig cand_cfg = ref_cfg;
    cand_cfg.seed = ref_cfg.seed + 77;
    cand_cfg.fault = fault;
    cand_cfg.fault_from_s = fault_from;
    SimulatedDevice ref(ref_cfg), cand(cand_cfg);
    Lease lr = ref.lease("v-ref");
    Lease lc = cand.lease("v-cand");
    return run_verdict(protocol, ref, cand, fmt, cal);
}

Trace trace_of(std::vector<std::pair<std::string, std::vector<double>>> channels) {
    Trace t;
    for (auto& [label, values] : channels) {
        Channel c;
        c.label = label;
        for (std::size_t k = 0; k < values.size(); ++k) {
            c.samples.push_back(Sample{0.1 * static_cast<double>(k), values[k]});
        }
        t.channels.push_back(std::move(c));
    }
    return t;
}

SimConfig blink_cfg(std::uint64_t seed = 5) {
    SimConfig cfg;
    cfg.model = BlinkPhoto{};
    cfg.seed = seed;
    return cfg;
}

SimConfig imu_cfg(std::uint64_t seed = 5) {
    SimConfig cfg;
    cfg.model = ServoIMU{};
    cfg.seed = seed;
    return cfg;
}

VerdictProtocol three_angle_protocol() {
    return VerdictProtocol::multi_stage({
        VerdictStage{StimulusCommand{"servo_angle", 0.0}, 10.0},
        VerdictStage{StimulusCommand{"servo_angle", 90.0}, 10.0},
        VerdictStage{StimulusCommand{"servo_angle", 180.0}, 10.0},
    });
}

}  // namespace

TEST_CASE("failure categories map to names and back") {
    for (FailureCategory cat :
         {FailureCategory::CompileError, FailureCategory::UploadError, FailureCategory::NoOutput,
          FailureCategory::FormatMismatch, FailureCategory::AllZerosOutput,
          FailureCategory::ScaleError, FailureCategory::SignalMismatch}) {
        CHECK(failure_category_from(failure_category_name(cat)) == cat);
    }
    CHECK(std::string(failure_category_name(FailureCategory::AllZerosOutput)) == "AllZeros");
    CHECK_THROWS_AS(failure_category_from("NotACategory"), Error);
}

TEST_CASE("protocols validate their stages") {
    VerdictProtocol empty;
    CHECK_THROWS_AS(empty.validate(), Error);
    VerdictProtocol zero = VerdictProtocol::single_window(0.0);
    CHECK_THROWS_AS(zero.validate(), Error);
    CHECK_NOTHROW(VerdictProtocol::single_window(10.0).validate());
    CHECK(three_angle_protocol().stages.size() == 3);
}

TEST_CASE("a faithful candidate passes a single-window verdict") {
    SerialFormat fmt = unlabeled();
    CalibrationProfile cal = make_calibration(blink_cfg(), fmt, 10.0);
    Verdict v = run_with_fault(blink_cfg(), NoFault{}, 0.0, fmt,
                               VerdictProtocol::single_window(10.0), cal);
    CHECK(v.passed);
    CHECK_FALSE(v.failure.has_value());
    CHECK_FALSE(v.k_est.has_value());
    REQUIRE(v.stages.size() == 1);
    CHECK(v.stages[0].passed);
    CHECK(v.stages[0].captured);
}

TEST_CASE("a silent candidate is NoOutput") {
    SerialFormat fmt = unlabeled();
    CalibrationProfile cal = make_calibration(blink_cfg(), fmt, 10.0);
    Verdict v = run_with_fault(blink_cfg(), DropLines{1.0}, 0.0, fmt,
                               VerdictProtocol::single_window(10.0), cal);
    CHECK_FALSE(v.passed);
    REQUIRE(v.failure.has_value());
    CHECK(*v.failure == FailureCategory::NoOutput);
    REQUIRE(v.stages.size() == 1);
    CHECK_FALSE(v.stages[0].captured);
}

TEST_CASE("heavy line corruption is FormatMismatch") {
    SerialFormat fmt = unlabeled();
    CalibrationProfile cal = make_calibration(blink_cfg(), fmt, 10.0);
    Verdict v = run_with_fault(blink_cfg(), GarbageLines{0.5}, 0.0, fmt,
                               VerdictProtocol::single_window(10.0), cal);
    CHECK_FALSE(v.passed);
    REQUIRE(v.failure.has_value());
    CHECK(*v.failure == FailureCategory::FormatMismatch);
    CHECK(v.stages[0].captured);
}

TEST_CASE("a flatlined candidate is AllZeros") {
    SerialFormat fmt = unlabeled();
    CalibrationProfile cal = make_calibration(blink_cfg(), fmt, 10.0);
    Verdict v = run_with_fault(blink_cfg(), AllZeros{}, 0.0, fmt,
                               VerdictProtocol::single_window(10.0), cal);
    CHECK_FALSE(v.passed);
    REQUIRE(v.failure.has_value());
    CHECK(*v.failure == FailureCategory::AllZerosOutput);
}

TEST_CASE("a doubled gain is ScaleError with a recovered factor") {
    SerialFormat fmt = unlabeled();
    CalibrationProfile cal = make_calibration(blink_cfg(), fmt, 10.0);
    Verdict v = run_with_fault(blink_cfg(), ScaleFactor{2.0}, 0.0, fmt,
                               VerdictProtocol::single_window(10.0), cal);
    CHECK_FALSE(v.passed);
    REQUIRE(v.failure.has_value());
    CHECK(*v.failure == FailureCategory::ScaleError);
    REQUIRE(v.k_est.has_value());
    CHECK(*v.k_est == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("quiet reference channels do not vote on the gain consensus") {
    // At zero degrees A_Y is pure noise; only A_X and A_Z carry gain votes.
    SerialFormat fmt = imu_format();
    CalibrationProfile cal = make_calibration(imu_cfg(), fmt, 10.0);
    Verdict v = run_with_fault(imu_cfg(), ScaleFactor{2.0}, 0.0, fmt,
                               VerdictProtocol::single_window(10.0), cal);
    CHECK_FALSE(v.passed);
    REQUIRE(v.failure.has_value());
    CHECK(*v.failure == FailureCategory::ScaleError);
    REQUIRE(v.k_est.has_value());
    CHECK(*v.k_est == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("a gain inside the tolerance band is not a scale error") {
    SerialFormat fmt = unlabeled();
    CalibrationProfile cal = make_calibration(blink_cfg(), fmt, 10.0);
    Verdict v = run_with_fault(blink_cfg(), ScaleFactor{1.05}, 0.0, fmt,
                               VerdictProtocol::single_window(10.0), cal);
    CHECK_FALSE(v.passed);
    REQUIRE(v.failure.has_value());
    CHECK(*v.failure == FailureCategory::SignalMismatch);
}

TEST_CASE("swapped channels break the consensus and land in SignalMismatch") {
    SerialFormat fmt = imu_format();
    CalibrationProfile cal = make_calibration(imu_cfg(), fmt, 10.0);
    Verdict v = run_with_fault(imu_cfg(), ChannelSwap{}, 0.0, fmt,
                               VerdictProtocol::single_window(10.0), cal);
    CHECK_FALSE(v.passed);
    REQUIRE(v.failure.has_value());
    CHECK(*v.failure == FailureCategory::SignalMismatch);
    CHECK_FALSE(v.k_est.has_value());
}

TEST_CASE("signal classification on synthetic traces") {
    VerifyOptions opts;

    Trace ref = trace_of({{"", {2.0, 2.0, 2.0, 2.0}}});
    Trace silent = trace_of({{"", {0.0004, -0.0004, 0.0004, -0.0004}}});
    AlignmentReport silent_report = aligned_distance(silent, ref, opts.align);
    SignalFailure f = classify_signal_failure(silent_report, silent, ref, opts);
    CHECK(f.category == FailureCategory::AllZerosOutput);

    // Both sides near zero: silence carries no information, so no AllZeros.
    Trace ref_quiet = trace_of({{"", {0.001, 0.001, 0.001, 0.001}}});
    AlignmentReport qr = aligned_distance(silent, ref_quiet, opts.align);
    f = classify_signal_failure(qr, silent, ref_quiet, opts);
    CHECK(f.category == FailureCategory::SignalMismatch);

    Trace tripled = trace_of({{"", {6.0, 6.0, 6.0, 6.0}}});
    AlignmentReport tr = aligned_distance(tripled, ref, opts.align);
    f = classify_signal_failure(tr, tripled, ref, opts);
    CHECK(f.category == FailureCategory::ScaleError);
    REQUIRE(f.k_est.has_value());
    CHECK(*f.k_est == doctest::Approx(3.0));

    Trace two_ch_ref = trace_of({{"X", {2.0, 2.0}}, {"Y", {2.0, 2.0}}});
    Trace disagree = trace_of({{"X", {4.0, 4.0}}, {"Y", {1.0, 1.0}}});
    AlignmentReport dr = aligned_distance(disagree, two_ch_ref, opts.align);
    f = classify_signal_failure(dr, disagree, two_ch_ref, opts);
    CHECK(f.category == FailureCategory::SignalMismatch);

    // Unit gain that still failed thresholds stays SignalMismatch.
    Trace same = trace_of({{"", {2.0, 2.0, 2.0, 2.0}}});
    AlignmentReport sr = aligned_distance(same, ref, opts.align);
    f = classify_signal_failure(sr, same, ref, opts);
    CHECK(f.category == FailureCategory::SignalMismatch);
}

TEST_CASE("a fault in the final stage leaves the earlier stages green") {
    SerialFormat fmt = imu_format();
    CalibrationProfile cal = make_calibration(imu_cfg(), fmt, 10.0);
    Verdict v = run_with_fault(imu_cfg(), ScaleFactor{2.0}, 20.0, fmt, three_angle_protocol(),
                               cal);
    CHECK_FALSE(v.passed);
    REQUIRE(v.stages.size() == 3);
    CHECK(v.stages[0].passed);
    CHECK(v.stages[1].passed);
    CHECK_FALSE(v.stages[2].passed);
    REQUIRE(v.failure.has_value());
    CHECK(*v.failure == FailureCategory::ScaleError);
}

TEST_CASE("an early failure short-circuits the remaining stages") {
    SerialFormat fmt = imu_format();
    CalibrationProfile cal = make_calibration(imu_cfg(), fmt, 10.0);
    Verdict v = run_with_fault(imu_cfg(), AllZeros{}, 0.0, fmt, three_angle_protocol(), cal);
    CHECK_FALSE(v.passed);
    CHECK(v.stages.size() == 1);
    REQUIRE(v.failure.has_value());
    CHECK(*v.failure == FailureCategory::AllZerosOutput);
}

TEST_CASE("an any-stage protocol keeps going and can still pass") {
    SerialFormat fmt = imu_format();
    CalibrationProfile cal = make_calibration(imu_cfg(), fmt, 10.0);
    VerdictProtocol protocol = three_angle_protocol();
    protocol.all_must_pass = false;
    Verdict v = run_with_fault(imu_cfg(), ScaleFactor{2.0}, 20.0, fmt, protocol, cal);
    CHECK(v.passed);
    CHECK(v.stages.size() == 3);
    CHECK_FALSE(v.failure.has_value());
    CHECK_FALSE(v.k_est.has_value());
}

TEST_CASE("a matching pair of reference rigs passes its own calibration") {
    SerialFormat fmt = imu_format();
    CalibrationProfile cal = make_calibration(imu_cfg(), fmt, 10.0);
    Verdict v = run_with_fault(imu_cfg(), NoFault{}, 0.0, fmt, three_angle_protocol(), cal);
    CHECK(v.passed);
    CHECK(v.stages.size() == 3);
}
