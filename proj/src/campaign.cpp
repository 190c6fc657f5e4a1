#include "hilbench/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hilbench/detail/digest.hpp"
#include "hilbench/detail/numfmt.hpp"
#include "hilbench/error.hpp"
#include "hilbench/jsonio.hpp"

namespace hilbench {

using nlohmann::json;
using detail::derive_seed;
using detail::format_double;

namespace {

std::string now_iso8601() {
    std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool is_infra(Errc code) {
    switch (code) {
        case Errc::ToolchainUnavailable:
        case Errc::PortUnavailable:
        case Errc::LeaseViolation:
        case Errc::ReplayMiss:
        case Errc::AuthMissing:
        case Errc::Transport:
        case Errc::ConfigError:
        case Errc::UnknownStrapping:
        case Errc::UnknownMode:
        case Errc::UnknownCommand:
        // Escaping parse errors concern the reference capture; the candidate
        // side is absorbed into NoOutput / FormatMismatch before this point.
        case Errc::NoSamples:
        case Errc::ChannelImbalance:
        case Errc::ChannelMismatch:
        case Errc::LabelMismatch:
            return true;
        default:
            return false;
    }
}

std::string sanitize_for_path(const std::string& name) {
    std::string out = name;
    for (char& c : out) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                          (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
        if (!keep) c = '_';
    }
    return out;
}

}  // namespace

void TaskSpec::validate() const {
    if (id.empty()) raise(Errc::ConfigError, "task id is empty");
    prompt_template.validate();
    serial_format.validate();
    protocol.validate();
    toolchain.validate();
    if (calibration_runs < 2) {
        raise(Errc::ConfigError, "task " + id + ": calibration needs at least 2 runs");
    }
    if (calibration_margin < 1.0) {
        raise(Errc::ConfigError, "task " + id + ": calibration margin must be >= 1");
    }
    if (threshold_relative <= 0.0) {
        raise(Errc::ConfigError, "task " + id + ": threshold_relative must be positive");
    }
    const std::size_t expected =
        serial_format.kind == SerialKind::LabeledLines ? serial_format.labels.size() : 1;
    for (const DeviceRef* ref : {&reference, &candidate_backend}) {
        if (ref->kind == DeviceRef::Kind::Simulated &&
            model_channel_count(ref->sim.model) != expected) {
            raise(Errc::ConfigError, "task " + id + ": stimulus model emits " +
                                         std::to_string(model_channel_count(ref->sim.model)) +
                                         " channels but the serial format expects " +
                                         std::to_string(expected));
        }
    }
    if (strapping && !register_map) {
        raise(Errc::ConfigError, "task " + id + ": strapping given without a register map");
    }
    if (scale_mode && !register_map) {
        raise(Errc::ConfigError, "task " + id + ": scale_mode given without a register map");
    }
    if (calibration.empty()) {
        raise(Errc::ConfigError, "task " + id + ": calibration must be \"compute\" or a path");
    }
}

void RepairPolicy::validate() const {
    if (max_retries < 0) raise(Errc::ConfigError, "max_retries must be >= 0");
    if (restart_after < 1) raise(Errc::ConfigError, "restart_after must be >= 1");
    if (repair_template.find("{error}") == std::string::npos) {
        raise(Errc::ConfigError, "repair template must reference {error}");
    }
}

const char* outcome_name(Outcome outcome) {
    switch (outcome) {
        case Outcome::CompileError: return "CompileError";
        case Outcome::FunctionalFail: return "FunctionalFail";
        case Outcome::Pass: return "Pass";
        case Outcome::InfraError: return "InfraError";
    }
    return "InfraError";
}

Outcome outcome_from(const std::string& name) {
    for (Outcome o : {Outcome::CompileError, Outcome::FunctionalFail, Outcome::Pass,
                      Outcome::InfraError}) {
        if (name == outcome_name(o)) return o;
    }
    raise(Errc::CorruptRecord, "unknown outcome: " + name);
}

std::string trial_record_to_json(const TrialRecord& record) {
    json j{{"trial_id", record.trial_id},
           {"task_id", record.task_id},
           {"model", record.model_name},
           {"provider_settings", record.provider_settings},
           {"prompt", record.prompt_text},
           {"responses", record.responses},
           {"outcome", outcome_name(record.outcome)},
           {"repair_attempts", record.repair_attempts},
           {"findings", record.codecheck_findings},
           {"started_at", record.started_at},
           {"finished_at", record.finished_at},
           {"trial_index", record.trial_index}};
    j["source"] = record.source ? json(*record.source) : json(nullptr);
    j["compile"] = record.compile ? json(*record.compile) : json(nullptr);
    j["verdict"] = record.verdict ? json(*record.verdict) : json(nullptr);
    if (!record.infra_error.empty()) j["infra_error"] = record.infra_error;
    return j.dump();
}

TrialRecord trial_record_from_json(const std::string& line) {
    try {
        json j = json::parse(line);
        TrialRecord record;
        record.trial_id = j.value("trial_id", std::string{});
        record.task_id = j.at("task_id").get<std::string>();
        record.model_name = j.at("model").get<std::string>();
        record.provider_settings = j.value("provider_settings", std::string{});
        record.prompt_text = j.value("prompt", std::string{});
        record.responses = j.value("responses", std::vector<std::string>{});
        record.outcome = outcome_from(j.at("outcome").get<std::string>());
        record.repair_attempts = j.value("repair_attempts", 0);
        record.codecheck_findings = j.value("findings", std::vector<Finding>{});
        record.started_at = j.value("started_at", std::string{});
        record.finished_at = j.value("finished_at", std::string{});
        record.trial_index = j.value("trial_index", 0);
        if (j.contains("source") && !j.at("source").is_null()) {
            record.source = j.at("source").get<SourceFile>();
        }
        if (j.contains("compile") && !j.at("compile").is_null()) {
            record.compile = j.at("compile").get<CompileResult>();
        }
        if (j.contains("verdict") && !j.at("verdict").is_null()) {
            record.verdict = j.at("verdict").get<Verdict>();
        }
        record.infra_error = j.value("infra_error", std::string{});
        return record;
    } catch (const Error& e) {
        if (e.code() == Errc::CorruptRecord) throw;
        raise(Errc::CorruptRecord, std::string("bad trial record: ") + e.what());
    } catch (const json::exception& e) {
        raise(Errc::CorruptRecord, std::string("bad trial record: ") + e.what());
    }
}

CalibrationProfile calibrate_task(const TaskSpec& task, int n_runs, std::uint64_t seed) {
    if (n_runs < 2) raise(Errc::InvalidArgument, "calibration needs at least 2 runs");
    const bool simulated = task.reference.kind == DeviceRef::Kind::Simulated;
    std::vector<std::pair<Trace, Trace>> pairs;
    for (int i = 0; i < n_runs; ++i) {
        DeviceRef ref_a = task.reference;
        DeviceRef ref_b = task.reference;
        if (simulated) {
            ref_a.sim.seed = derive_seed(seed, static_cast<std::uint64_t>(2 * i));
            ref_b.sim.seed = derive_seed(seed, static_cast<std::uint64_t>(2 * i + 1));
        }
        auto dev_a = make_device(ref_a);
        // A physical rig has one reference board; its pair member is a second
        // pass over the same hardware.
        auto dev_b = simulated ? make_device(ref_b) : dev_a;
        Lease lease_a = dev_a->lease("calibration");
        Lease lease_b;
        if (dev_b != dev_a) lease_b = dev_b->lease("calibration");
        for (const VerdictStage& stage : task.protocol.stages) {
            if (stage.command) {
                dev_a->command(*stage.command);
                if (dev_b != dev_a) dev_b->command(*stage.command);
            }
            Trace trace_a = parse_serial(dev_a->capture(stage.duration_s, task.serial_format),
                                         task.serial_format);
            Trace trace_b = parse_serial(dev_b->capture(stage.duration_s, task.serial_format),
                                         task.serial_format);
            pairs.emplace_back(std::move(trace_a), std::move(trace_b));
        }
    }
    CalibrationProfile profile =
        calibrate(pairs, task.calibration_margin, task.threshold_relative, task.verify.align);
    profile.task_id = task.id;
    return profile;
}

namespace {

struct ExtractOutcome {
    std::optional<SourceFile> source;
    CompileResult compile;
};

// Extraction failures surface as failed compiles so the repair loop can ask
// the model for a corrected response.
ExtractOutcome extract_and_compile(const std::string& response, const TaskSpec& task) {
    ExtractOutcome out;
    try {
        SourceFile src = extract_source(response, task.pass_through);
        if (src.text.empty()) raise(Errc::NoCodeBlocks, "extracted source is empty");
        out.source = std::move(src);
    } catch (const Error& e) {
        if (e.code() != Errc::NoCodeBlocks && e.code() != Errc::UnterminatedFence) throw;
        out.compile.ok = false;
        out.compile.diagnostics = std::string("error: ") + e.what();
        out.compile.categories = {DiagCategory::Other};
        return out;
    }
    out.compile = compile(*out.source, task.toolchain);
    return out;
}

std::vector<Finding> static_checks(const SourceFile& src, const TaskSpec& task) {
    std::optional<LibrarySets> sets;
    if (task.library_sets) sets = LibrarySets::load(*task.library_sets);
    if (task.register_map) {
        RegisterMap map = RegisterMap::load(*task.register_map);
        return run_all_checks(src, map, task.strapping, task.scale_mode, sets);
    }
    if (sets) return check_mixed_libraries(src, *sets);
    return {};
}

}  // namespace

TrialRecord run_trial(const TaskSpec& task, const std::shared_ptr<Provider>& provider,
                      const RepairPolicy& policy, std::uint64_t seed, int trial_index,
                      const CalibrationProfile& cal) {
    policy.validate();
    TrialRecord record;
    record.task_id = task.id;
    record.model_name = provider->model_name();
    record.provider_settings = provider->settings_summary();
    record.trial_index = trial_index;
    record.trial_id =
        task.id + ":" + provider->model_name() + ":" + std::to_string(trial_index);
    record.started_at = now_iso8601();
    try {
        Session session = fresh_session(provider, record.trial_id);
        const std::string prompt = render_prompt(task.prompt_template, task.prompt_params);
        record.prompt_text = prompt;
        std::string reply = session.send(prompt);
        record.responses.push_back(reply);
        ExtractOutcome attempt = extract_and_compile(reply, task);

        int failed_repairs_in_session = 0;
        while (!attempt.compile.ok && record.repair_attempts < policy.max_retries) {
            std::string message;
            if (failed_repairs_in_session >= policy.restart_after) {
                session = fresh_session(provider, record.trial_id);
                failed_repairs_in_session = 0;
                message = prompt;
            } else {
                PromptTemplate repair{policy.repair_template, {"error"}};
                message = render_prompt(repair, {{"error", attempt.compile.diagnostics}});
            }
            reply = session.send(message);
            record.responses.push_back(reply);
            ++record.repair_attempts;
            attempt = extract_and_compile(reply, task);
            if (!attempt.compile.ok) ++failed_repairs_in_session;
        }
        record.source = attempt.source;
        record.compile = attempt.compile;

        if (!attempt.compile.ok) {
            record.outcome = Outcome::CompileError;
            record.finished_at = now_iso8601();
            return record;
        }

        DeviceRef ref_cfg = task.reference;
        DeviceRef cand_cfg = task.candidate_backend;
        if (ref_cfg.kind == DeviceRef::Kind::Simulated) {
            ref_cfg.sim.seed = derive_seed(seed, "ref-device");
        }
        if (cand_cfg.kind == DeviceRef::Kind::Simulated) {
            cand_cfg.sim.seed = derive_seed(seed, "cand-device");
        }
        try {
            upload(attempt.compile.artifact, cand_cfg, task.toolchain);
            auto ref_dev = make_device(ref_cfg);
            auto cand_dev = make_device(cand_cfg);
            Lease ref_lease = ref_dev->lease(record.trial_id);
            Lease cand_lease = cand_dev->lease(record.trial_id);
            Verdict verdict = run_verdict(task.protocol, *ref_dev, *cand_dev, task.serial_format,
                                          cal, task.verify);
            record.verdict = verdict;
            record.outcome = verdict.passed ? Outcome::Pass : Outcome::FunctionalFail;
        } catch (const Error& e) {
            if (e.code() != Errc::UploadFailed) throw;
            Verdict verdict;
            verdict.passed = false;
            verdict.failure = FailureCategory::UploadError;
            record.verdict = verdict;
            record.outcome = Outcome::FunctionalFail;
        }
        record.codecheck_findings = static_checks(*record.source, task);
    } catch (const Error& e) {
        if (!is_infra(e.code())) throw;
        record.outcome = Outcome::InfraError;
        record.infra_error = std::string(errc_name(e.code())) + ": " + e.what();
    }
    record.finished_at = now_iso8601();
    return record;
}

void append_record(const std::filesystem::path& records_path, const TrialRecord& record) {
    if (records_path.has_parent_path()) {
        std::filesystem::create_directories(records_path.parent_path());
    }
    std::ofstream out(records_path, std::ios::binary | std::ios::app);
    if (!out) raise(Errc::ConfigError, "cannot open " + records_path.string() + " for append");
    out << trial_record_to_json(record) << '\n';
    out.flush();
}

std::vector<TrialRecord> read_records(const std::filesystem::path& records_path,
                                      int* corrupt_count) {
    std::vector<TrialRecord> records;
    int corrupt = 0;
    std::ifstream in(records_path, std::ios::binary);
    if (in) {
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                records.push_back(trial_record_from_json(line));
            } catch (const Error& e) {
                if (e.code() != Errc::CorruptRecord) throw;
                ++corrupt;
            }
        }
    }
    if (corrupt_count) *corrupt_count = corrupt;
    return records;
}

CampaignResult run_campaign(const std::vector<TaskSpec>& tasks,
                            const std::vector<std::shared_ptr<Provider>>& providers,
                            const std::filesystem::path& records_path,
                            const CampaignOptions& options) {
    if (tasks.empty()) raise(Errc::ConfigError, "campaign has no tasks");
    if (providers.empty()) raise(Errc::ConfigError, "campaign has no providers");
    if (options.n_per_cell < 0) raise(Errc::ConfigError, "n_per_cell must be >= 0");
    options.policy.validate();
    for (const TaskSpec& task : tasks) task.validate();

    std::map<std::pair<std::string, std::string>, int> existing;
    if (std::filesystem::exists(records_path)) {
        for (const TrialRecord& r : read_records(records_path)) {
            ++existing[{r.task_id, r.model_name}];
        }
    }

    // Thresholds are computed once per task and persisted beside the records
    // so a resumed campaign judges trials against identical numbers.
    std::map<std::string, CalibrationProfile> profiles;
    for (const TaskSpec& task : tasks) {
        if (task.calibration == "compute") {
            std::filesystem::path side = records_path;
            side += "." + sanitize_for_path(task.id) + ".calibration";
            if (std::filesystem::exists(side)) {
                profiles[task.id] = CalibrationProfile::load(side);
            } else {
                CalibrationProfile profile = calibrate_task(
                    task, task.calibration_runs, derive_seed(options.seed, "calibrate/" + task.id));
                if (side.has_parent_path()) {
                    std::filesystem::create_directories(side.parent_path());
                }
                profile.save(side);
                profiles[task.id] = std::move(profile);
            }
        } else {
            profiles[task.id] = CalibrationProfile::load(task.calibration);
        }
    }

    struct Job {
        const TaskSpec* task;
        std::shared_ptr<Provider> provider;
        int index;
    };
    std::vector<Job> jobs;
    CampaignResult result;
    for (const TaskSpec& task : tasks) {
        for (const auto& provider : providers) {
            const int have = existing[{task.id, provider->model_name()}];
            result.skipped_existing += std::min(have, options.n_per_cell);
            for (int i = have; i < options.n_per_cell; ++i) {
                jobs.push_back(Job{&task, provider, i});
            }
        }
    }

    std::mutex out_mutex;
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    auto worker = [&] {
        for (;;) {
            if (stop.load()) return;
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            const Job& job = jobs[k];
            try {
                const std::uint64_t trial_seed =
                    derive_seed(options.seed, job.task->id + "\x1f" +
                                                  job.provider->model_name() + "\x1f" +
                                                  std::to_string(job.index));
                TrialRecord record = run_trial(*job.task, job.provider, options.policy,
                                               trial_seed, job.index,
                                               profiles.at(job.task->id));
                std::lock_guard<std::mutex> lock(out_mutex);
                append_record(records_path, record);
                ++result.executed;
                if (options.on_record) options.on_record(record);
            } catch (...) {
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
                stop.store(true);
                return;
            }
        }
    };

    if (options.parallel <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int n = std::min<std::size_t>(options.parallel, std::max<std::size_t>(jobs.size(), 1));
        pool.reserve(n);
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return result;
}

double CellSummary::compile_rate() const {
    return n_valid == 0 ? 0.0 : static_cast<double>(n_compiled) / n_valid;
}

double CellSummary::functional_rate() const {
    return n_valid == 0 ? 0.0 : static_cast<double>(n_passed) / n_valid;
}

Summary aggregate(const std::vector<TrialRecord>& records, int corrupt_records) {
    Summary summary;
    summary.corrupt_records = corrupt_records;
    for (const TrialRecord& record : records) {
        CellSummary& cell = summary.cells[{record.task_id, record.model_name}];
        if (record.outcome == Outcome::InfraError) {
            ++cell.n_infra;
            continue;
        }
        ++cell.n_valid;
        if (record.compile && record.compile->ok) ++cell.n_compiled;
        switch (record.outcome) {
            case Outcome::Pass:
                ++cell.n_passed;
                break;
            case Outcome::CompileError:
                ++cell.failure_histogram["CompileError"];
                break;
            case Outcome::FunctionalFail: {
                const char* name = record.verdict && record.verdict->failure
                                       ? failure_category_name(*record.verdict->failure)
                                       : "SignalMismatch";
                ++cell.failure_histogram[name];
                break;
            }
            case Outcome::InfraError:
                break;
        }
        std::set<std::string> kinds;
        for (const Finding& finding : record.codecheck_findings) {
            kinds.insert(finding_kind_name(finding.kind));
        }
        for (const std::string& kind : kinds) ++cell.finding_counts[kind];
    }
    return summary;
}

Summary aggregate(const std::filesystem::path& records_path) {
    int corrupt = 0;
    std::vector<TrialRecord> records = read_records(records_path, &corrupt);
    return aggregate(records, corrupt);
}

namespace {

const std::vector<std::string>& failure_columns() {
    static const std::vector<std::string> columns = {
        "CompileError", "UploadError",   "NoOutput", "FormatMismatch",
        "AllZeros",     "ScaleError",    "SignalMismatch"};
    return columns;
}

const std::vector<std::string>& finding_columns() {
    static const std::vector<std::string> columns = {
        "WrongI2CAddress", "HallucinatedRegister", "ScaleMismatch", "MixedLibraries"};
    return columns;
}

int lookup(const std::map<std::string, int>& counts, const std::string& key) {
    auto it = counts.find(key);
    return it == counts.end() ? 0 : it->second;
}

std::string report_csv(const Summary& summary) {
    std::ostringstream out;
    out << "task,model,trials,infra,compiled,passed,compile_rate,functional_rate";
    for (const std::string& c : failure_columns()) out << ',' << c;
    for (const std::string& c : finding_columns()) out << ',' << c;
    out << '\n';
    for (const auto& [key, cell] : summary.cells) {
        out << key.first << ',' << key.second << ',' << cell.n_valid << ',' << cell.n_infra
            << ',' << cell.n_compiled << ',' << cell.n_passed << ','
            << format_double(cell.compile_rate()) << ','
            << format_double(cell.functional_rate());
        for (const std::string& c : failure_columns()) {
            out << ',' << lookup(cell.failure_histogram, c);
        }
        for (const std::string& c : finding_columns()) {
            out << ',' << lookup(cell.finding_counts, c);
        }
        out << '\n';
    }
    return out.str();
}

std::string report_table(const Summary& summary) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"task", "model", "trials", "infra", "compile", "pass", "failures", "findings"});
    for (const auto& [key, cell] : summary.cells) {
        std::ostringstream failures;
        bool first = true;
        for (const std::string& c : failure_columns()) {
            const int n = lookup(cell.failure_histogram, c);
            if (n == 0) continue;
            if (!first) failures << ' ';
            failures << c << ":" << n;
            first = false;
        }
        if (first) failures << "-";
        std::ostringstream findings;
        first = true;
        for (const std::string& c : finding_columns()) {
            const int n = lookup(cell.finding_counts, c);
            if (n == 0) continue;
            if (!first) findings << ' ';
            findings << c << ":" << n;
            first = false;
        }
        if (first) findings << "-";
        std::ostringstream compile_pct;
        compile_pct << std::lround(cell.compile_rate() * 100.0) << '%';
        std::ostringstream pass_pct;
        pass_pct << std::lround(cell.functional_rate() * 100.0) << '%';
        rows.push_back({key.first, key.second, std::to_string(cell.n_valid),
                        std::to_string(cell.n_infra), compile_pct.str(), pass_pct.str(),
                        failures.str(), findings.str()});
    }
    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::ostringstream out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << row[i];
            if (i + 1 < row.size()) out << std::string(width[i] - row[i].size() + 2, ' ');
        }
        out << '\n';
    }
    if (summary.corrupt_records > 0) {
        out << "(" << summary.corrupt_records << " corrupt record"
            << (summary.corrupt_records == 1 ? "" : "s") << " skipped)\n";
    }
    return out.str();
}

}  // namespace

std::string report(const Summary& summary, ReportFormat format) {
    return format == ReportFormat::Csv ? report_csv(summary) : report_table(summary);
}

}  // namespace hilbench
