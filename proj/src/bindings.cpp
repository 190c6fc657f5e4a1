#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <utility>
#include <vector>

#include "hilbench/align.hpp"
#include "hilbench/campaign.hpp"
#include "hilbench/codecheck.hpp"
#include "hilbench/config.hpp"
#include "hilbench/extract.hpp"
#include "hilbench/llm.hpp"
#include "hilbench/simbench.hpp"
#include "hilbench/timeseries.hpp"
#include "hilbench/toolchain.hpp"
#include "hilbench/verify.hpp"

namespace py = pybind11;
using namespace hilbench;

namespace {

SerialFormat make_format(const std::string& kind, std::vector<std::string> labels,
                         double sample_period) {
    SerialFormat fmt;
    if (kind == "unlabeled") {
        fmt.kind = SerialKind::UnlabeledLines;
    } else if (kind == "labeled") {
        fmt.kind = SerialKind::LabeledLines;
    } else {
        raise(Errc::InvalidArgument, "kind must be \"unlabeled\" or \"labeled\"");
    }
    fmt.labels = std::move(labels);
    fmt.sample_period = sample_period;
    fmt.validate();
    return fmt;
}

Trace trace_from_channels(const std::map<std::string, std::vector<double>>& channels,
                          double sample_period) {
    Trace trace;
    for (const auto& [label, values] : channels) {
        Channel channel;
        channel.label = label;
        channel.samples.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            channel.samples.push_back({static_cast<double>(i) * sample_period, values[i]});
        }
        trace.channels.push_back(std::move(channel));
    }
    return trace;
}

py::dict alignment_report_to_dict(const AlignmentReport& report) {
    py::dict per_channel;
    for (const auto& [label, ch] : report.per_channel) {
        py::dict d;
        d["dtw_cost"] = ch.dtw_cost;
        d["aligned_euclidean"] = ch.aligned_euclidean;
        d["mean_relative_deviation"] = ch.mean_relative_deviation;
        d["absolute_fallback"] = ch.absolute_fallback;
        per_channel[py::str(label)] = d;
    }
    py::dict out;
    out["dtw_cost"] = report.dtw_cost;
    out["aligned_euclidean"] = report.aligned_euclidean;
    out["mean_relative_deviation"] = report.mean_relative_deviation;
    out["per_channel"] = per_channel;
    return out;
}

StimulusModel model_by_name(const std::string& model, double angle) {
    if (model == "blink_photo") return BlinkPhoto{};
    if (model == "actuator_range") return ActuatorRange{};
    if (model == "servo_imu") {
        ServoIMU imu;
        imu.angle_deg = angle;
        return imu;
    }
    raise(Errc::InvalidArgument,
          "unknown model: " + model + " (blink_photo, actuator_range, servo_imu)");
}

py::dict finding_to_dict(const Finding& finding) {
    py::dict d;
    d["kind"] = finding_kind_name(finding.kind);
    d["line"] = finding.line;
    d["confidence"] = finding.confidence == Confidence::Exact ? "exact" : "heuristic";
    d["found"] = finding.found;
    d["expected"] = finding.expected;
    d["found_real"] = finding.found_real;
    d["expected_real"] = finding.expected_real;
    d["names"] = finding.names;
    d["text"] = finding.describe();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hardware-in-the-loop harness for model-written firmware";
    m.attr("__version__") = "0.1.0";

    py::register_exception<Error>(m, "HarnessError");

    py::class_<SerialFormat>(m, "SerialFormat")
        .def(py::init(&make_format), py::arg("kind") = "unlabeled",
             py::arg("labels") = std::vector<std::string>{}, py::arg("sample_period") = 0.1)
        .def_property_readonly(
            "kind",
            [](const SerialFormat& fmt) {
                return fmt.kind == SerialKind::UnlabeledLines ? "unlabeled" : "labeled";
            })
        .def_readwrite("labels", &SerialFormat::labels)
        .def_readwrite("sample_period", &SerialFormat::sample_period);

    py::class_<Trace>(m, "Trace")
        .def_static("from_channels", &trace_from_channels, py::arg("channels"),
                    py::arg("sample_period") = 0.1)
        .def("channels",
             [](const Trace& trace) {
                 std::map<std::string, std::vector<double>> out;
                 for (const auto& channel : trace.channels) {
                     out[channel.label] = channel.values();
                 }
                 return out;
             })
        .def("times",
             [](const Trace& trace, const std::string& label) {
                 const Channel* channel = trace.find_channel(label);
                 if (!channel) raise(Errc::InvalidArgument, "no channel " + label);
                 std::vector<double> t;
                 t.reserve(channel->samples.size());
                 for (const Sample& s : channel->samples) t.push_back(s.t);
                 return t;
             })
        .def_property_readonly("meta", [](const Trace& trace) { return trace.meta; })
        .def("total_samples", &Trace::total_samples);

    m.def("parse_serial", &parse_serial, py::arg("text"), py::arg("format"));
    m.def("format_serial", &format_serial, py::arg("trace"), py::arg("format"));
    m.def("window", &window, py::arg("trace"), py::arg("t0"), py::arg("t1"));

    m.def(
        "euclidean_distance",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            return euclidean_distance(a, b);
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "dtw",
        [](const std::vector<double>& a, const std::vector<double>& b, const std::string& cost,
           std::optional<std::size_t> band) {
            DtwCost c = DtwCost::Abs;
            if (cost == "squared") {
                c = DtwCost::Squared;
            } else if (cost != "abs") {
                raise(Errc::InvalidArgument, "cost must be \"abs\" or \"squared\"");
            }
            DtwResult result = dtw(a, b, c, band);
            return py::make_tuple(result.cost, result.path.pairs);
        },
        py::arg("a"), py::arg("b"), py::arg("cost") = "abs", py::arg("band") = py::none());
    m.def(
        "aligned_distance",
        [](const Trace& a, const Trace& b, bool use_dtw, double eps_rel, double low_signal_rms) {
            AlignOptions opts;
            opts.use_dtw = use_dtw;
            opts.eps_rel = eps_rel;
            opts.low_signal_rms = low_signal_rms;
            return alignment_report_to_dict(aligned_distance(a, b, opts));
        },
        py::arg("candidate"), py::arg("reference"), py::arg("use_dtw") = true,
        py::arg("eps_rel") = 1e-3, py::arg("low_signal_rms") = 0.05);

    py::class_<CalibrationProfile>(m, "CalibrationProfile")
        .def_readonly("task_id", &CalibrationProfile::task_id)
        .def_readonly("n_runs", &CalibrationProfile::n_runs)
        .def_readonly("distances", &CalibrationProfile::distances)
        .def_readonly("threshold_distance", &CalibrationProfile::threshold_distance)
        .def_readonly("threshold_relative", &CalibrationProfile::threshold_relative)
        .def_readonly("margin", &CalibrationProfile::margin)
        .def("serialize", &CalibrationProfile::serialize)
        .def_static("deserialize",
                    [](const std::string& text) { return CalibrationProfile::deserialize(text); })
        .def("save", &CalibrationProfile::save, py::arg("path"))
        .def_static("load", &CalibrationProfile::load, py::arg("path"));

    m.def(
        "calibrate",
        [](const std::vector<std::pair<Trace, Trace>>& pairs, double margin,
           double threshold_relative) { return calibrate(pairs, margin, threshold_relative); },
        py::arg("pairs"), py::arg("margin") = 1.1, py::arg("threshold_relative") = 0.10);

    m.def(
        "compare",
        [](const Trace& candidate, const Trace& reference, const CalibrationProfile& cal) {
            VerifyOptions opts;
            AlignmentReport report = aligned_distance(candidate, reference, opts.align);
            const bool passed = report.aligned_euclidean <= cal.threshold_distance &&
                                report.mean_relative_deviation <= cal.threshold_relative;
            py::dict out = alignment_report_to_dict(report);
            out["passed"] = passed;
            if (!passed) {
                SignalFailure failure =
                    classify_signal_failure(report, candidate, reference, opts);
                out["failure"] = failure_category_name(failure.category);
                if (failure.k_est) out["k_est"] = *failure.k_est;
            }
            return out;
        },
        py::arg("candidate"), py::arg("reference"), py::arg("calibration"));

    py::class_<SourceFile>(m, "SourceFile")
        .def_readonly("text", &SourceFile::text)
        .def_readonly("block_count", &SourceFile::block_count)
        .def_readonly("fence_langs", &SourceFile::fence_langs)
        .def_property_readonly("origin",
                               [](const SourceFile& src) {
                                   return src.origin == SourceOrigin::Extracted ? "extracted"
                                                                                : "passed_through";
                               })
        .def("digest", &SourceFile::digest);

    m.def("extract_source", &extract_source, py::arg("response"), py::arg("pass_through") = false);

    m.def(
        "classify_diagnostics",
        [](const std::string& diagnostics) {
            std::vector<std::string> names;
            for (DiagCategory category : classify_diagnostics(diagnostics)) {
                names.emplace_back(diag_category_name(category));
            }
            return names;
        },
        py::arg("diagnostics"));

    m.def(
        "render_prompt",
        [](const std::string& template_text, const std::map<std::string, std::string>& params) {
            PromptTemplate tpl;
            tpl.text = template_text;
            return render_prompt(tpl, params);
        },
        py::arg("template_text"), py::arg("params"));

    m.def(
        "simulate",
        [](const std::string& model, double duration, std::uint64_t seed, const std::string& fault,
           double fault_from, double angle, double sample_period,
           std::optional<std::vector<std::string>> labels) {
            SimConfig cfg;
            cfg.model = model_by_name(model, angle);
            cfg.fault = parse_fault(fault);
            cfg.seed = seed;
            cfg.fault_from_s = fault_from;
            SerialFormat fmt;
            fmt.sample_period = sample_period;
            if (model == "servo_imu") {
                fmt.kind = SerialKind::LabeledLines;
                fmt.labels = {"A_X", "A_Y", "A_Z"};
            }
            if (labels) {
                fmt.kind = SerialKind::LabeledLines;
                fmt.labels = *labels;
            }
            fmt.validate();
            SimulatedDevice device(cfg);
            Lease lease = device.lease("python");
            return parse_serial(device.capture(duration, fmt), fmt);
        },
        py::arg("model"), py::arg("duration") = 10.0, py::arg("seed") = 0,
        py::arg("fault") = "none", py::arg("fault_from") = 0.0, py::arg("angle") = 0.0,
        py::arg("sample_period") = 0.1, py::arg("labels") = py::none());

    m.def(
        "check_source",
        [](const std::string& source_text, const std::filesystem::path& map_path,
           std::optional<std::string> strapping, std::optional<std::string> mode,
           std::optional<std::filesystem::path> library_sets) {
            RegisterMap map = RegisterMap::load(map_path);
            SourceFile src;
            src.text = source_text;
            src.block_count = 1;
            std::optional<LibrarySets> sets;
            if (library_sets) sets = LibrarySets::load(*library_sets);
            py::list out;
            for (const Finding& finding : run_all_checks(src, map, strapping, mode, sets)) {
                out.append(finding_to_dict(finding));
            }
            return out;
        },
        py::arg("source_text"), py::arg("map_path"), py::arg("strapping") = py::none(),
        py::arg("mode") = py::none(), py::arg("library_sets") = py::none());

    m.def(
        "report_records",
        [](const std::filesystem::path& records, const std::string& fmt) {
            ReportFormat f = ReportFormat::Table;
            if (fmt == "csv") {
                f = ReportFormat::Csv;
            } else if (fmt != "table") {
                raise(Errc::InvalidArgument, "format must be \"csv\" or \"table\"");
            }
            return report(aggregate(records), f);
        },
        py::arg("records"), py::arg("format") = "table");

    m.def(
        "run_campaign_config",
        [](const std::filesystem::path& config_path) {
            Config config = Config::load(config_path);
            std::vector<std::shared_ptr<Provider>> providers;
            for (const ProviderRef& ref : config.providers) {
                providers.push_back(make_provider(ref));
            }
            CampaignResult result = run_campaign(config.tasks, providers, config.records,
                                                 config.campaign_options());
            py::dict out;
            out["executed"] = result.executed;
            out["skipped_existing"] = result.skipped_existing;
            out["records"] = config.records.string();
            return out;
        },
        py::arg("config_path"));
}
