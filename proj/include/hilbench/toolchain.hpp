#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hilbench/extract.hpp"
#include "hilbench/simbench.hpp"

namespace hilbench {

enum class ToolchainKind { External, Scripted };

struct ToolchainConfig {
    ToolchainKind kind = ToolchainKind::Scripted;
    // External: whitespace-split command templates, run without a shell.
    // {src} and {out} substitute in compile_cmd, {artifact} and {port} in
    // upload_cmd.
    std::string compile_cmd;
    std::string upload_cmd;
    std::string source_name = "candidate.cpp";
    std::filesystem::path workdir;
    double compile_timeout_s = 120.0;
    double upload_timeout_s = 60.0;
    // Scripted: canned results keyed by source digest (offline campaigns).
    std::filesystem::path script_path;
    std::filesystem::path diag_rules;  // optional pattern-table override

    void validate() const;
};

enum class DiagCategory {
    MissingEntryPoints,
    UnknownLibrary,
    UnknownIdentifier,
    SyntaxError,
    Timeout,
    Other,
};

const char* diag_category_name(DiagCategory category);

struct DiagRule {
    DiagCategory category = DiagCategory::Other;
    std::string pattern;  // ECMAScript regex, searched anywhere in the output
};

std::vector<DiagRule> default_diag_rules();
std::vector<DiagRule> load_diag_rules(const std::filesystem::path& path);

// Every matching rule contributes its category; an empty result means no
// rule recognized the output.
std::set<DiagCategory> classify_diagnostics(std::string_view diagnostics,
                                            const std::vector<DiagRule>& rules = default_diag_rules());

struct CompileResult {
    bool ok = false;
    std::string diagnostics;
    std::set<DiagCategory> categories;
    std::filesystem::path artifact;
};

CompileResult compile(const SourceFile& src, const ToolchainConfig& cfg);

// Simulated devices accept any existing artifact; physical ones run
// upload_cmd. Throws UploadFailed with the captured output on failure.
void upload(const std::filesystem::path& artifact, const DeviceRef& device,
            const ToolchainConfig& cfg);

}  // namespace hilbench
