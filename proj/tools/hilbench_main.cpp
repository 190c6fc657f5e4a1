// Command line front end. Exit codes: 0 = ran to completion (a failing
// verdict still exits 0), 1 = infrastructure or internal error, 2 = usage.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hilbench/campaign.hpp"
#include "hilbench/codecheck.hpp"
#include "hilbench/config.hpp"
#include "hilbench/detail/digest.hpp"
#include "hilbench/detail/numfmt.hpp"
#include "hilbench/extract.hpp"
#include "hilbench/jsonio.hpp"

namespace {

using namespace hilbench;
using detail::derive_seed;
using detail::format_double;

std::string read_stream(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") return read_stream(std::cin);
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::ConfigError, "cannot open " + path);
    return read_stream(in);
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::ConfigError, "cannot open " + path + " for writing");
    out << text;
}

TaskSpec load_task_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::ConfigError, "cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ConfigError, path + ": " + e.what());
    }
    std::filesystem::path p(path);
    return task_from_json(j, p.has_parent_path() ? p.parent_path() : std::filesystem::path("."));
}

struct CalibrateArgs {
    std::string task;
    int runs = 0;  // 0 = the task's own setting
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_calibrate(const CalibrateArgs& args) {
    TaskSpec task = load_task_file(args.task);
    const int runs = args.runs > 0 ? args.runs : task.calibration_runs;
    CalibrationProfile profile = calibrate_task(task, runs, args.seed);
    if (args.out.empty()) {
        std::cout << profile.serialize();
    } else {
        profile.save(args.out);
        std::cout << "calibrated " << task.id << ": threshold_distance "
                  << format_double(profile.threshold_distance) << ", threshold_relative "
                  << format_double(profile.threshold_relative) << " (" << profile.n_runs
                  << " reference pairs) -> " << args.out << "\n";
    }
    return 0;
}

struct ProviderArgs {
    std::string replay_dir;
    std::string endpoint;
    std::string model;
    std::string auth_env = "OPENAI_API_KEY";
    double temperature = -1.0;
};

ProviderRef provider_from_args(const ProviderArgs& args) {
    ProviderRef ref;
    if (!args.replay_dir.empty()) {
        ref.kind = ProviderRef::Kind::Replay;
        ref.replay_dir = args.replay_dir;
        ref.model_name = args.model.empty() ? "replay" : args.model;
    } else if (!args.endpoint.empty()) {
        ref.kind = ProviderRef::Kind::HttpChat;
        ref.endpoint = args.endpoint;
        ref.model_name = args.model;
        ref.auth_env_var = args.auth_env;
        ref.temperature = args.temperature;
        if (ref.model_name.empty()) {
            raise(Errc::ConfigError, "--endpoint needs --model");
        }
    } else {
        raise(Errc::ConfigError, "provide --replay-dir or --endpoint");
    }
    ref.id = ref.model_name;
    return ref;
}

struct RunArgs {
    std::string task;
    ProviderArgs provider;
    std::string calibration = "compute";
    std::uint64_t seed = 0;
    int index = 0;
    int max_retries = -1;  // -1 = keep the default policy
    std::string out;
};

int cmd_run(const RunArgs& args) {
    TaskSpec task = load_task_file(args.task);
    auto provider = make_provider(provider_from_args(args.provider));
    CalibrationProfile cal;
    if (args.calibration == "compute") {
        cal = calibrate_task(task, task.calibration_runs, derive_seed(args.seed, "calibrate"));
    } else {
        cal = CalibrationProfile::load(args.calibration);
    }
    RepairPolicy policy;
    if (args.max_retries >= 0) policy.max_retries = args.max_retries;
    TrialRecord record = run_trial(task, provider, policy,
                                   derive_seed(args.seed, std::to_string(args.index)), args.index,
                                   cal);
    write_output(args.out, trial_record_to_json(record) + "\n");
    std::cerr << task.id << " x " << record.model_name << " -> " << outcome_name(record.outcome);
    if (record.verdict && record.verdict->failure) {
        std::cerr << " (" << failure_category_name(*record.verdict->failure) << ")";
    }
    std::cerr << "\n";
    return 0;
}

struct CampaignArgs {
    std::string config;
    std::string records;  // overrides the config
    int n_per_cell = -1;  // overrides the config
    std::string report_format = "table";
};

ReportFormat parse_report_format(const std::string& name) {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "table") return ReportFormat::Table;
    raise(Errc::ConfigError, "unknown report format: " + name);
}

int cmd_campaign(const CampaignArgs& args) {
    Config config = Config::load(args.config);
    if (!args.records.empty()) config.records = args.records;
    if (args.n_per_cell >= 0) config.n_per_cell = args.n_per_cell;
    std::vector<std::shared_ptr<Provider>> providers;
    providers.reserve(config.providers.size());
    for (const ProviderRef& ref : config.providers) providers.push_back(make_provider(ref));
    CampaignResult result =
        run_campaign(config.tasks, providers, config.records, config.campaign_options());
    std::cerr << "executed " << result.executed << " trials, " << result.skipped_existing
              << " already on disk\n";
    std::cout << report(aggregate(config.records), parse_report_format(args.report_format));
    return 0;
}

struct ReportArgs {
    std::string records;
    std::string format = "table";
};

int cmd_report(const ReportArgs& args) {
    std::cout << report(aggregate(std::filesystem::path(args.records)),
                        parse_report_format(args.format));
    return 0;
}

struct CheckArgs {
    std::string map;
    std::string source;
    std::string strapping;
    std::string mode;
    std::string library_sets;
};

int cmd_check(const CheckArgs& args) {
    RegisterMap map = RegisterMap::load(args.map);
    SourceFile src;
    src.text = read_input(args.source);
    src.block_count = 1;
    std::optional<std::string> strapping;
    if (!args.strapping.empty()) strapping = args.strapping;
    std::optional<std::string> mode;
    if (!args.mode.empty()) mode = args.mode;
    std::optional<LibrarySets> sets;
    if (!args.library_sets.empty()) sets = LibrarySets::load(args.library_sets);
    std::vector<Finding> findings = run_all_checks(src, map, strapping, mode, sets);
    for (const Finding& finding : findings) std::cout << finding.describe() << "\n";
    if (findings.empty()) std::cout << "no findings\n";
    return 0;
}

struct SimulateArgs {
    std::string model = "blink_photo";
    std::string fault = "none";
    std::uint64_t seed = 0;
    double duration = 10.0;
    double sample_period = 0.1;
    double fault_from = 0.0;
    double angle = 0.0;
    std::string labels;  // comma separated; empty = the model's default
};

int cmd_simulate(const SimulateArgs& args) {
    SimConfig cfg;
    SerialFormat fmt;
    fmt.sample_period = args.sample_period;
    if (args.model == "blink_photo") {
        cfg.model = BlinkPhoto{};
    } else if (args.model == "actuator_range") {
        cfg.model = ActuatorRange{};
    } else if (args.model == "servo_imu") {
        ServoIMU imu;
        imu.angle_deg = args.angle;
        cfg.model = imu;
        fmt.kind = SerialKind::LabeledLines;
        fmt.labels = {"A_X", "A_Y", "A_Z"};
    } else {
        raise(Errc::ConfigError, "unknown model: " + args.model +
                                     " (blink_photo, actuator_range, servo_imu)");
    }
    if (!args.labels.empty()) {
        fmt.kind = SerialKind::LabeledLines;
        fmt.labels.clear();
        std::stringstream ss(args.labels);
        std::string label;
        while (std::getline(ss, label, ',')) fmt.labels.push_back(label);
    }
    fmt.validate();
    cfg.fault = parse_fault(args.fault);
    cfg.seed = args.seed;
    cfg.fault_from_s = args.fault_from;
    SimulatedDevice device(cfg);
    Lease lease = device.lease("simulate");
    std::cout << device.capture(args.duration, fmt);
    return 0;
}

struct ExtractArgs {
    std::string in;
    std::string out;
    bool pass_through = false;
};

int cmd_extract(const ExtractArgs& args) {
    SourceFile src = extract_source(read_input(args.in), args.pass_through);
    write_output(args.out, src.text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hardware-in-the-loop harness for model-written firmware"};
    app.require_subcommand(1);

    CalibrateArgs calibrate_args;
    CLI::App* calibrate = app.add_subcommand(
        "calibrate", "Measure reference self-distance and derive pass thresholds");
    calibrate->add_option("--task", calibrate_args.task, "Task definition (JSON)")->required();
    calibrate->add_option("--runs", calibrate_args.runs, "Reference pair count");
    calibrate->add_option("--seed", calibrate_args.seed, "Base seed");
    calibrate->add_option("--out", calibrate_args.out, "Profile destination (default stdout)");

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run one prompt-to-verdict trial");
    run->add_option("--task", run_args.task, "Task definition (JSON)")->required();
    run->add_option("--replay-dir", run_args.provider.replay_dir, "Canned response directory");
    run->add_option("--endpoint", run_args.provider.endpoint, "Chat completions endpoint");
    run->add_option("--model", run_args.provider.model, "Model name");
    run->add_option("--auth-env", run_args.provider.auth_env,
                    "Environment variable holding the API key");
    run->add_option("--temperature", run_args.provider.temperature, "Sampling temperature");
    run->add_option("--calibration", run_args.calibration,
                    "Profile path, or \"compute\" (default)");
    run->add_option("--seed", run_args.seed, "Base seed");
    run->add_option("--index", run_args.index, "Trial index");
    run->add_option("--max-retries", run_args.max_retries, "Repair attempts after a failed build");
    run->add_option("--out", run_args.out, "Record destination (default stdout)");

    CampaignArgs campaign_args;
    CLI::App* campaign = app.add_subcommand("campaign", "Run a full task x model grid");
    campaign->add_option("--config", campaign_args.config, "Campaign config (JSON)")->required();
    campaign->add_option("--records", campaign_args.records, "Records file override");
    campaign->add_option("--n", campaign_args.n_per_cell, "Trials per cell override");
    campaign->add_option("--report", campaign_args.report_format, "csv or table");

    ReportArgs report_args;
    CLI::App* report_cmd = app.add_subcommand("report", "Summarize a records file");
    report_cmd->add_option("--records", report_args.records, "Records file (JSONL)")->required();
    report_cmd->add_option("--format", report_args.format, "csv or table");

    CheckArgs check_args;
    CLI::App* check = app.add_subcommand("check", "Static-check a source file against a chip map");
    check->add_option("--map", check_args.map, "Register map file")->required();
    check->add_option("--source", check_args.source, "Source file (default stdin)");
    check->add_option("--strapping", check_args.strapping, "Address strapping, e.g. SDO=GND");
    check->add_option("--mode", check_args.mode, "Scale mode, e.g. 2g");
    check->add_option("--library-sets", check_args.library_sets, "Library sets (JSON)");

    SimulateArgs simulate_args;
    CLI::App* simulate = app.add_subcommand("simulate", "Print serial output of a simulated rig");
    simulate->add_option("--model", simulate_args.model,
                         "blink_photo, actuator_range or servo_imu");
    simulate->add_option("--fault", simulate_args.fault,
                         "none, all_zeros, scale:K, jitter:F, drop:P, garbage:P, channel_swap");
    simulate->add_option("--seed", simulate_args.seed, "Noise seed");
    simulate->add_option("--duration", simulate_args.duration, "Capture seconds");
    simulate->add_option("--sample-period", simulate_args.sample_period, "Seconds between lines");
    simulate->add_option("--fault-from", simulate_args.fault_from,
                         "Bench time at which the fault activates");
    simulate->add_option("--angle", simulate_args.angle, "Servo angle (servo_imu)");
    simulate->add_option("--labels", simulate_args.labels, "Comma separated channel labels");

    ExtractArgs extract_args;
    CLI::App* extract = app.add_subcommand("extract", "Pull fenced code out of a chat response");
    extract->add_option("--in", extract_args.in, "Response file (default stdin)");
    extract->add_option("--out", extract_args.out, "Destination (default stdout)");
    extract->add_flag("--pass-through", extract_args.pass_through,
                      "Use fenceless responses whole");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (calibrate->parsed()) return cmd_calibrate(calibrate_args);
        if (run->parsed()) return cmd_run(run_args);
        if (campaign->parsed()) return cmd_campaign(campaign_args);
        if (report_cmd->parsed()) return cmd_report(report_args);
        if (check->parsed()) return cmd_check(check_args);
        if (simulate->parsed()) return cmd_simulate(simulate_args);
        if (extract->parsed()) return cmd_extract(extract_args);
    } catch (const Error& e) {
        std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
