#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hilbench/codecheck.hpp"
#include "hilbench/llm.hpp"
#include "hilbench/toolchain.hpp"
#include "hilbench/verify.hpp"

namespace hilbench {

struct TaskSpec {
    std::string id;
    PromptTemplate prompt_template;
    std::map<std::string, std::string> prompt_params;
    bool pass_through = false;  // accept fenceless responses whole
    SerialFormat serial_format;
    DeviceRef reference;          // runs the verified program
    DeviceRef candidate_backend;  // template; per-trial seeds are derived
    VerdictProtocol protocol;
    ToolchainConfig toolchain;
    std::optional<std::filesystem::path> register_map;
    std::optional<std::string> strapping;
    std::optional<std::string> scale_mode;
    std::optional<std::filesystem::path> library_sets;
    std::string calibration = "compute";  // or a saved profile path
    int calibration_runs = 50;
    double calibration_margin = 1.1;
    double threshold_relative = 0.10;
    VerifyOptions verify;

    void validate() const;
};

struct RepairPolicy {
    int max_retries = 0;     // extra model calls after the first; 0 = single shot
    int restart_after = 2;   // consecutive failed repairs before a fresh session
    std::string repair_template =
        "When I try to compile this code, I get the following error: {error}";

    void validate() const;
};

enum class Outcome { CompileError, FunctionalFail, Pass, InfraError };

const char* outcome_name(Outcome outcome);
Outcome outcome_from(const std::string& name);

struct TrialRecord {
    std::string trial_id;
    std::string task_id;
    std::string model_name;
    std::string provider_settings;
    std::string prompt_text;
    std::vector<std::string> responses;  // one per model call
    std::optional<SourceFile> source;
    std::optional<CompileResult> compile;
    std::optional<Verdict> verdict;
    Outcome outcome = Outcome::InfraError;
    int repair_attempts = 0;
    std::vector<Finding> codecheck_findings;
    std::string infra_error;
    std::string started_at;
    std::string finished_at;
    int trial_index = 0;
};

std::string trial_record_to_json(const TrialRecord& record);
TrialRecord trial_record_from_json(const std::string& line);  // throws CorruptRecord

// Reference-vs-reference runs over the task protocol; distances from every
// stage feed one pooled profile.
CalibrationProfile calibrate_task(const TaskSpec& task, int n_runs, std::uint64_t seed);

TrialRecord run_trial(const TaskSpec& task, const std::shared_ptr<Provider>& provider,
                      const RepairPolicy& policy, std::uint64_t seed, int trial_index,
                      const CalibrationProfile& cal);

struct CampaignOptions {
    int n_per_cell = 50;
    RepairPolicy policy;
    std::uint64_t seed = 0;
    int parallel = 1;
    // Invoked after each record lands on disk; tests use it to simulate
    // being killed mid-run.
    std::function<void(const TrialRecord&)> on_record;
};

struct CampaignResult {
    int executed = 0;
    int skipped_existing = 0;
};

// Appends one JSON record per trial to records_path, flushing as it goes.
// Re-running with the same arguments resumes: existing records per
// (task, model) cell are counted and only the remainder is executed.
CampaignResult run_campaign(const std::vector<TaskSpec>& tasks,
                            const std::vector<std::shared_ptr<Provider>>& providers,
                            const std::filesystem::path& records_path,
                            const CampaignOptions& options);

std::vector<TrialRecord> read_records(const std::filesystem::path& records_path,
                                      int* corrupt_count = nullptr);
void append_record(const std::filesystem::path& records_path, const TrialRecord& record);

struct CellSummary {
    int n_valid = 0;  // trials that produced a measurement
    int n_infra = 0;  // excluded from every rate
    int n_compiled = 0;
    int n_passed = 0;
    std::map<std::string, int> failure_histogram;  // category name -> count
    std::map<std::string, int> finding_counts;     // finding kind -> trials with >= 1

    double compile_rate() const;
    double functional_rate() const;
};

struct Summary {
    std::map<std::pair<std::string, std::string>, CellSummary> cells;  // (task, model)
    int corrupt_records = 0;
};

Summary aggregate(const std::vector<TrialRecord>& records, int corrupt_records = 0);
Summary aggregate(const std::filesystem::path& records_path);

enum class ReportFormat { Csv, Table };

std::string report(const Summary& summary, ReportFormat format);

}  // namespace hilbench
