#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hilbench {

struct RunResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string output;  // stdout and stderr interleaved
};

// Runs argv directly (no shell). On timeout the process group is killed and
// whatever output was captured so far is returned.
RunResult run_argv(const std::vector<std::string>& argv, double timeout_s,
                   const std::optional<std::filesystem::path>& workdir = std::nullopt);

// PATH resolution for a command name; names containing '/' are checked as-is.
std::optional<std::filesystem::path> find_executable(const std::string& name);

}  // namespace hilbench
