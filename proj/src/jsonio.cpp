#include "hilbench/jsonio.hpp"

#include <string>
#include <vector>

#include "hilbench/error.hpp"

namespace hilbench {

using nlohmann::json;

void to_json(json& j, const SerialFormat& format) {
    j = json{{"kind", format.kind == SerialKind::UnlabeledLines ? "unlabeled" : "labeled"},
             {"labels", format.labels},
             {"sample_period", format.sample_period}};
}

void from_json(const json& j, SerialFormat& format) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "unlabeled") {
        format.kind = SerialKind::UnlabeledLines;
    } else if (kind == "labeled") {
        format.kind = SerialKind::LabeledLines;
    } else {
        raise(Errc::ConfigError, "unknown serial format kind: " + kind);
    }
    format.labels = j.value("labels", std::vector<std::string>{});
    format.sample_period = j.value("sample_period", 0.1);
}

void to_json(json& j, const StimulusModel& model) {
    if (const auto* b = std::get_if<BlinkPhoto>(&model)) {
        j = json{{"type", "blink_photo"},     {"period", b->period},
                 {"adc_low", b->adc_low},     {"adc_high", b->adc_high},
                 {"noise_sigma", b->noise_sigma}, {"decimals", b->decimals}};
    } else if (const auto* a = std::get_if<ActuatorRange>(&model)) {
        j = json{{"type", "actuator_range"},  {"span_cm", a->span_cm},
                 {"period", a->period},       {"base_cm", a->base_cm},
                 {"noise_sigma", a->noise_sigma}, {"decimals", a->decimals}};
    } else {
        const auto& s = std::get<ServoIMU>(model);
        j = json{{"type", "servo_imu"},       {"mount_deg", s.mount_deg},
                 {"angle_deg", s.angle_deg},  {"noise_sigma", s.noise_sigma},
                 {"decimals", s.decimals}};
    }
}

void from_json(const json& j, StimulusModel& model) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "blink_photo") {
        BlinkPhoto b;
        b.period = j.value("period", b.period);
        b.adc_low = j.value("adc_low", b.adc_low);
        b.adc_high = j.value("adc_high", b.adc_high);
        b.noise_sigma = j.value("noise_sigma", b.noise_sigma);
        b.decimals = j.value("decimals", b.decimals);
        model = b;
    } else if (type == "actuator_range") {
        ActuatorRange a;
        a.span_cm = j.value("span_cm", a.span_cm);
        a.period = j.value("period", a.period);
        a.base_cm = j.value("base_cm", a.base_cm);
        a.noise_sigma = j.value("noise_sigma", a.noise_sigma);
        a.decimals = j.value("decimals", a.decimals);
        model = a;
    } else if (type == "servo_imu") {
        ServoIMU s;
        s.mount_deg = j.value("mount_deg", s.mount_deg);
        s.angle_deg = j.value("angle_deg", s.angle_deg);
        s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
        s.decimals = j.value("decimals", s.decimals);
        model = s;
    } else {
        raise(Errc::ConfigError, "unknown stimulus model type: " + type);
    }
}

void to_json(json& j, const DeviceRef& ref) {
    if (ref.kind == DeviceRef::Kind::Simulated) {
        j = json{{"kind", "simulated"},
                 {"model", ref.sim.model},
                 {"fault", fault_name(ref.sim.fault)},
                 {"seed", ref.sim.seed},
                 {"fault_from_s", ref.sim.fault_from_s}};
    } else {
        j = json{{"kind", "physical_serial"},
                 {"port", ref.physical.port},
                 {"baud", ref.physical.baud},
                 {"control_port", ref.physical.control_port}};
    }
}

void from_json(const json& j, DeviceRef& ref) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "simulated") {
        ref.kind = DeviceRef::Kind::Simulated;
        j.at("model").get_to(ref.sim.model);
        ref.sim.fault = parse_fault(j.value("fault", std::string("none")));
        ref.sim.seed = j.value("seed", std::uint64_t{0});
        ref.sim.fault_from_s = j.value("fault_from_s", 0.0);
    } else if (kind == "physical_serial") {
        ref.kind = DeviceRef::Kind::PhysicalSerial;
        ref.physical.port = j.at("port").get<std::string>();
        ref.physical.baud = j.value("baud", 9600);
        ref.physical.control_port = j.value("control_port", std::string{});
    } else {
        raise(Errc::ConfigError, "unknown device kind: " + kind);
    }
}

void to_json(json& j, const VerdictProtocol& protocol) {
    json stages = json::array();
    for (const auto& stage : protocol.stages) {
        json s{{"duration_s", stage.duration_s}};
        if (stage.command) {
            s["command"] = json{{"name", stage.command->name}, {"value", stage.command->value}};
        }
        stages.push_back(std::move(s));
    }
    j = json{{"stages", std::move(stages)}, {"all_must_pass", protocol.all_must_pass}};
}

void from_json(const json& j, VerdictProtocol& protocol) {
    protocol.stages.clear();
    for (const auto& s : j.at("stages")) {
        VerdictStage stage;
        stage.duration_s = s.at("duration_s").get<double>();
        if (s.contains("command") && !s.at("command").is_null()) {
            StimulusCommand cmd;
            cmd.name = s.at("command").at("name").get<std::string>();
            cmd.value = s.at("command").at("value").get<double>();
            stage.command = cmd;
        }
        protocol.stages.push_back(std::move(stage));
    }
    protocol.all_must_pass = j.value("all_must_pass", true);
}

void to_json(json& j, const ToolchainConfig& config) {
    j = json{{"kind", config.kind == ToolchainKind::External ? "external" : "scripted"},
             {"compile_cmd", config.compile_cmd},
             {"upload_cmd", config.upload_cmd},
             {"source_name", config.source_name},
             {"workdir", config.workdir.string()},
             {"compile_timeout_s", config.compile_timeout_s},
             {"upload_timeout_s", config.upload_timeout_s},
             {"script", config.script_path.string()},
             {"diag_rules", config.diag_rules.string()}};
}

void from_json(const json& j, ToolchainConfig& config) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "external") {
        config.kind = ToolchainKind::External;
    } else if (kind == "scripted") {
        config.kind = ToolchainKind::Scripted;
    } else {
        raise(Errc::ConfigError, "unknown toolchain kind: " + kind);
    }
    config.compile_cmd = j.value("compile_cmd", std::string{});
    config.upload_cmd = j.value("upload_cmd", std::string{});
    config.source_name = j.value("source_name", std::string("candidate.cpp"));
    config.workdir = j.value("workdir", std::string{});
    config.compile_timeout_s = j.value("compile_timeout_s", 120.0);
    config.upload_timeout_s = j.value("upload_timeout_s", 60.0);
    config.script_path = j.value("script", std::string{});
    config.diag_rules = j.value("diag_rules", std::string{});
}

void to_json(json& j, const ProviderRef& ref) {
    j = json{{"kind", ref.kind == ProviderRef::Kind::Replay ? "replay" : "http_chat"},
             {"id", ref.id},
             {"model", ref.model_name},
             {"endpoint", ref.endpoint},
             {"auth_env_var", ref.auth_env_var},
             {"replay_dir", ref.replay_dir.string()},
             {"request_timeout_s", ref.request_timeout_s},
             {"max_retries_transport", ref.max_retries_transport},
             {"temperature", ref.temperature},
             {"requests_per_minute", ref.requests_per_minute}};
}

void from_json(const json& j, ProviderRef& ref) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "replay") {
        ref.kind = ProviderRef::Kind::Replay;
    } else if (kind == "http_chat") {
        ref.kind = ProviderRef::Kind::HttpChat;
    } else {
        raise(Errc::ConfigError, "unknown provider kind: " + kind);
    }
    ref.id = j.value("id", std::string{});
    ref.model_name = j.value("model", std::string{});
    ref.endpoint = j.value("endpoint", std::string{});
    ref.auth_env_var = j.value("auth_env_var", std::string("OPENAI_API_KEY"));
    ref.replay_dir = j.value("replay_dir", std::string{});
    ref.request_timeout_s = j.value("request_timeout_s", 60.0);
    ref.max_retries_transport = j.value("max_retries_transport", 2);
    ref.temperature = j.value("temperature", -1.0);
    ref.requests_per_minute = j.value("requests_per_minute", 0.0);
    if (ref.id.empty()) ref.id = ref.model_name;
    if (ref.model_name.empty()) ref.model_name = ref.id;
}

void to_json(json& j, const SourceFile& source) {
    j = json{{"text", source.text},
             {"block_count", source.block_count},
             {"origin", source.origin == SourceOrigin::Extracted ? "extracted" : "passed_through"},
             {"fence_langs", source.fence_langs}};
}

void from_json(const json& j, SourceFile& source) {
    source.text = j.at("text").get<std::string>();
    source.block_count = j.value("block_count", 0);
    source.origin = j.value("origin", std::string("extracted")) == "passed_through"
                        ? SourceOrigin::PassedThrough
                        : SourceOrigin::Extracted;
    source.fence_langs = j.value("fence_langs", std::vector<std::string>{});
}

namespace {

DiagCategory diag_category_from(const std::string& name) {
    for (DiagCategory c : {DiagCategory::MissingEntryPoints, DiagCategory::UnknownLibrary,
                           DiagCategory::UnknownIdentifier, DiagCategory::SyntaxError,
                           DiagCategory::Timeout, DiagCategory::Other}) {
        if (name == diag_category_name(c)) return c;
    }
    raise(Errc::ConfigError, "unknown diagnostic category: " + name);
}

}  // namespace

void to_json(json& j, const CompileResult& result) {
    json cats = json::array();
    for (DiagCategory c : result.categories) cats.push_back(diag_category_name(c));
    j = json{{"ok", result.ok},
             {"diagnostics", result.diagnostics},
             {"categories", std::move(cats)},
             {"artifact", result.artifact.string()}};
}

void from_json(const json& j, CompileResult& result) {
    result.ok = j.at("ok").get<bool>();
    result.diagnostics = j.value("diagnostics", std::string{});
    result.categories.clear();
    for (const auto& c : j.value("categories", json::array())) {
        result.categories.insert(diag_category_from(c.get<std::string>()));
    }
    result.artifact = j.value("artifact", std::string{});
}

namespace {

json channel_to_json(const ChannelAlignment& ch) {
    return json{{"dtw_cost", ch.dtw_cost},
                {"aligned_euclidean", ch.aligned_euclidean},
                {"mean_relative_deviation", ch.mean_relative_deviation},
                {"absolute_fallback", ch.absolute_fallback}};
}

ChannelAlignment channel_from_json(const json& j) {
    ChannelAlignment ch;
    ch.dtw_cost = j.value("dtw_cost", 0.0);
    ch.aligned_euclidean = j.value("aligned_euclidean", 0.0);
    ch.mean_relative_deviation = j.value("mean_relative_deviation", 0.0);
    ch.absolute_fallback = j.value("absolute_fallback", false);
    return ch;
}

}  // namespace

void to_json(json& j, const StageReport& stage) {
    json per_channel = json::object();
    for (const auto& [label, ch] : stage.alignment.per_channel) {
        per_channel[label] = channel_to_json(ch);
    }
    // Warp paths are dropped; records keep the scalar metrics only.
    j = json{{"passed", stage.passed},
             {"captured", stage.captured},
             {"alignment",
              json{{"dtw_cost", stage.alignment.dtw_cost},
                   {"aligned_euclidean", stage.alignment.aligned_euclidean},
                   {"mean_relative_deviation", stage.alignment.mean_relative_deviation},
                   {"per_channel", std::move(per_channel)}}}};
}

void from_json(const json& j, StageReport& stage) {
    stage.passed = j.at("passed").get<bool>();
    stage.captured = j.value("captured", false);
    stage.alignment = AlignmentReport{};
    if (j.contains("alignment")) {
        const json& a = j.at("alignment");
        stage.alignment.dtw_cost = a.value("dtw_cost", 0.0);
        stage.alignment.aligned_euclidean = a.value("aligned_euclidean", 0.0);
        stage.alignment.mean_relative_deviation = a.value("mean_relative_deviation", 0.0);
        const json per_channel = a.value("per_channel", json::object());
        for (const auto& [label, ch] : per_channel.items()) {
            stage.alignment.per_channel[label] = channel_from_json(ch);
        }
    }
}

void to_json(json& j, const Verdict& verdict) {
    j = json{{"passed", verdict.passed}, {"stages", verdict.stages}};
    if (verdict.failure) j["failure"] = failure_category_name(*verdict.failure);
    if (verdict.k_est) j["k_est"] = *verdict.k_est;
}

void from_json(const json& j, Verdict& verdict) {
    verdict.passed = j.at("passed").get<bool>();
    verdict.stages = j.value("stages", std::vector<StageReport>{});
    verdict.failure.reset();
    if (j.contains("failure") && !j.at("failure").is_null()) {
        verdict.failure = failure_category_from(j.at("failure").get<std::string>());
    }
    verdict.k_est.reset();
    if (j.contains("k_est") && !j.at("k_est").is_null()) {
        verdict.k_est = j.at("k_est").get<double>();
    }
}

void to_json(json& j, const Finding& finding) {
    j = json{{"kind", finding_kind_name(finding.kind)},
             {"line", finding.line},
             {"confidence", finding.confidence == Confidence::Exact ? "exact" : "heuristic"},
             {"found", finding.found},
             {"expected", finding.expected},
             {"found_real", finding.found_real},
             {"expected_real", finding.expected_real},
             {"names", finding.names}};
}

void from_json(const json& j, Finding& finding) {
    finding.kind = finding_kind_from(j.at("kind").get<std::string>());
    finding.line = j.value("line", 0);
    finding.confidence = j.value("confidence", std::string("exact")) == "heuristic"
                             ? Confidence::Heuristic
                             : Confidence::Exact;
    finding.found = j.value("found", 0LL);
    finding.expected = j.value("expected", 0LL);
    finding.found_real = j.value("found_real", 0.0);
    finding.expected_real = j.value("expected_real", 0.0);
    finding.names = j.value("names", std::vector<std::string>{});
}

}  // namespace hilbench
