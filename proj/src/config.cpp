#include "hilbench/config.hpp"

#include <fstream>
#include <sstream>

#include "hilbench/error.hpp"
#include "hilbench/jsonio.hpp"

namespace hilbench {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
    if (p.empty() || p.is_absolute()) return p;
    return base / p;
}

json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::ConfigError, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        raise(Errc::ConfigError, path.string() + ": " + e.what());
    }
}

AlignOptions align_from_json(const json& j) {
    AlignOptions align;
    align.use_dtw = j.value("use_dtw", align.use_dtw);
    align.eps_rel = j.value("eps_rel", align.eps_rel);
    align.low_signal_rms = j.value("low_signal_rms", align.low_signal_rms);
    align.max_deviation = j.value("max_deviation", align.max_deviation);
    if (j.contains("band") && !j.at("band").is_null()) {
        align.band = j.at("band").get<std::size_t>();
    }
    return align;
}

VerifyOptions verify_from_json(const json& j) {
    VerifyOptions opts;
    opts.eps_abs = j.value("eps_abs", opts.eps_abs);
    opts.max_skipped_fraction = j.value("max_skipped_fraction", opts.max_skipped_fraction);
    opts.scale_band_lo = j.value("scale_band_lo", opts.scale_band_lo);
    opts.scale_band_hi = j.value("scale_band_hi", opts.scale_band_hi);
    opts.scale_consensus = j.value("scale_consensus", opts.scale_consensus);
    if (j.contains("align")) opts.align = align_from_json(j.at("align"));
    return opts;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::ConfigError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RepairPolicy repair_from_json(const json& j) {
    RepairPolicy policy;
    policy.max_retries = j.value("max_retries", policy.max_retries);
    policy.restart_after = j.value("restart_after", policy.restart_after);
    policy.repair_template = j.value("template", policy.repair_template);
    policy.validate();
    return policy;
}

}  // namespace

TaskSpec task_from_json(const json& j, const std::filesystem::path& base_dir) {
    TaskSpec task;
    try {
        task.id = j.at("id").get<std::string>();

        const json& prompt = j.at("prompt");
        if (prompt.contains("file")) {
            task.prompt_template.text =
                read_text_file(resolve(base_dir, prompt.at("file").get<std::string>()));
        } else {
            task.prompt_template.text = prompt.at("text").get<std::string>();
        }
        const json params = prompt.value("params", json::object());
        for (const auto& [key, value] : params.items()) {
            task.prompt_params[key] = value.get<std::string>();
            task.prompt_template.required.insert(key);
        }

        task.pass_through = j.value("pass_through", false);
        j.at("serial_format").get_to(task.serial_format);
        j.at("reference").get_to(task.reference);
        j.at("candidate").get_to(task.candidate_backend);
        j.at("protocol").get_to(task.protocol);
        j.at("toolchain").get_to(task.toolchain);
        task.toolchain.workdir = resolve(base_dir, task.toolchain.workdir);
        task.toolchain.script_path = resolve(base_dir, task.toolchain.script_path);
        task.toolchain.diag_rules = resolve(base_dir, task.toolchain.diag_rules);

        if (j.contains("register_map")) {
            task.register_map = resolve(base_dir, j.at("register_map").get<std::string>());
        }
        if (j.contains("strapping")) task.strapping = j.at("strapping").get<std::string>();
        if (j.contains("scale_mode")) task.scale_mode = j.at("scale_mode").get<std::string>();
        if (j.contains("library_sets")) {
            task.library_sets = resolve(base_dir, j.at("library_sets").get<std::string>());
        }

        task.calibration = j.value("calibration", std::string("compute"));
        if (task.calibration != "compute") {
            task.calibration = resolve(base_dir, task.calibration).string();
        }
        task.calibration_runs = j.value("calibration_runs", task.calibration_runs);
        task.calibration_margin = j.value("calibration_margin", task.calibration_margin);
        task.threshold_relative = j.value("threshold_relative", task.threshold_relative);
        if (j.contains("verify")) task.verify = verify_from_json(j.at("verify"));
    } catch (const json::exception& e) {
        raise(Errc::ConfigError, "task " + task.id + ": " + e.what());
    } catch (const Error& e) {
        if (e.code() == Errc::ConfigError) throw;
        raise(Errc::ConfigError, "task " + task.id + ": " + e.what());
    }
    task.validate();
    return task;
}

CampaignOptions Config::campaign_options() const {
    CampaignOptions options;
    options.n_per_cell = n_per_cell;
    options.policy = repair;
    options.seed = seed;
    options.parallel = parallel;
    return options;
}

Config Config::load(const std::filesystem::path& path) {
    Config config;
    config.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    json j = parse_file(path);
    try {
        config.records = resolve(config.base_dir, j.value("records", std::string("records.jsonl")));
        config.n_per_cell = j.value("n_per_cell", config.n_per_cell);
        config.seed = j.value("seed", config.seed);
        config.parallel = j.value("parallel", config.parallel);
        if (j.contains("repair")) config.repair = repair_from_json(j.at("repair"));

        for (const json& p : j.value("providers", json::array())) {
            ProviderRef ref = p.get<ProviderRef>();
            ref.replay_dir = resolve(config.base_dir, ref.replay_dir);
            config.providers.push_back(std::move(ref));
        }
        for (const json& t : j.value("tasks", json::array())) {
            if (t.is_string()) {
                std::filesystem::path task_path = resolve(config.base_dir, t.get<std::string>());
                std::filesystem::path task_base = task_path.has_parent_path()
                                                      ? task_path.parent_path()
                                                      : std::filesystem::path(".");
                config.tasks.push_back(task_from_json(parse_file(task_path), task_base));
            } else {
                config.tasks.push_back(task_from_json(t, config.base_dir));
            }
        }
    } catch (const json::exception& e) {
        raise(Errc::ConfigError, path.string() + ": " + e.what());
    }
    if (config.n_per_cell < 0) raise(Errc::ConfigError, "n_per_cell must be >= 0");
    if (config.parallel < 1) raise(Errc::ConfigError, "parallel must be >= 1");
    if (config.providers.empty()) raise(Errc::ConfigError, path.string() + ": no providers");
    if (config.tasks.empty()) raise(Errc::ConfigError, path.string() + ": no tasks");
    for (std::size_t i = 0; i < config.tasks.size(); ++i) {
        for (std::size_t k = i + 1; k < config.tasks.size(); ++k) {
            if (config.tasks[i].id == config.tasks[k].id) {
                raise(Errc::ConfigError, "duplicate task id: " + config.tasks[i].id);
            }
        }
    }
    return config;
}

}  // namespace hilbench
