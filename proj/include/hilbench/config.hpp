#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "hilbench/campaign.hpp"

namespace hilbench {

// One campaign definition: providers, tasks, run parameters. Relative paths
// inside the file resolve against the file's own directory; tasks may be
// inline objects or paths to task files.
struct Config {
    std::filesystem::path base_dir;
    std::filesystem::path records = "records.jsonl";
    int n_per_cell = 50;
    std::uint64_t seed = 0;
    int parallel = 1;
    RepairPolicy repair;
    std::vector<ProviderRef> providers;
    std::vector<TaskSpec> tasks;

    CampaignOptions campaign_options() const;

    // Parses and fully validates; any problem is a ConfigError naming the
    // offending file.
    static Config load(const std::filesystem::path& path);
};

TaskSpec task_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

}  // namespace hilbench
