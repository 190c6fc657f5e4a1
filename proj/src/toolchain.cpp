#include "hilbench/toolchain.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hilbench/proc.hpp"

namespace hilbench {

void ToolchainConfig::validate() const {
    if (workdir.empty()) raise(Errc::ConfigError, "toolchain workdir is empty");
    if (kind == ToolchainKind::External) {
        if (compile_cmd.find("{src}") == std::string::npos) {
            raise(Errc::ConfigError, "compile_cmd must reference {src}");
        }
        if (compile_cmd.find("{out}") == std::string::npos) {
            raise(Errc::ConfigError, "compile_cmd must reference {out}");
        }
    } else {
        if (script_path.empty()) raise(Errc::ConfigError, "scripted toolchain needs script_path");
    }
}

const char* diag_category_name(DiagCategory category) {
    switch (category) {
        case DiagCategory::MissingEntryPoints: return "MissingEntryPoints";
        case DiagCategory::UnknownLibrary: return "UnknownLibrary";
        case DiagCategory::UnknownIdentifier: return "UnknownIdentifier";
        case DiagCategory::SyntaxError: return "SyntaxError";
        case DiagCategory::Timeout: return "Timeout";
        case DiagCategory::Other: return "Other";
    }
    return "Other";
}

namespace {

DiagCategory diag_category_from(const std::string& name) {
    if (name == "MissingEntryPoints") return DiagCategory::MissingEntryPoints;
    if (name == "UnknownLibrary") return DiagCategory::UnknownLibrary;
    if (name == "UnknownIdentifier") return DiagCategory::UnknownIdentifier;
    if (name == "SyntaxError") return DiagCategory::SyntaxError;
    if (name == "Timeout") return DiagCategory::Timeout;
    if (name == "Other") return DiagCategory::Other;
    raise(Errc::ConfigError, "unknown diagnostic category '" + name + "'");
}

}  // namespace

std::vector<DiagRule> default_diag_rules() {
    // Textual conventions of the usual gcc-based embedded toolchains.
    return {
        {DiagCategory::MissingEntryPoints, R"(undefined reference to [`'][^`']*(setup|loop))"},
        {DiagCategory::UnknownLibrary, R"(fatal error: [^\n]*: No such file or directory)"},
        {DiagCategory::UnknownIdentifier, R"(was not declared in this scope)"},
        {DiagCategory::SyntaxError, R"(error: expected )"},
    };
}

std::vector<DiagRule> load_diag_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::ConfigError, "cannot read diagnostic rules " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) {
        raise(Errc::ConfigError, "diagnostic rules must be a JSON array");
    }
    std::vector<DiagRule> rules;
    for (const auto& item : doc) {
        DiagRule rule;
        rule.category = diag_category_from(item.at("category").get<std::string>());
        rule.pattern = item.at("pattern").get<std::string>();
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::set<DiagCategory> classify_diagnostics(std::string_view diagnostics,
                                            const std::vector<DiagRule>& rules) {
    std::set<DiagCategory> out;
    std::string text(diagnostics);
    for (const DiagRule& rule : rules) {
        std::regex re(rule.pattern, std::regex::ECMAScript);
        if (std::regex_search(text, re)) out.insert(rule.category);
    }
    return out;
}

namespace {

std::vector<std::string> split_command(const std::string& tmpl) {
    std::vector<std::string> out;
    std::istringstream in(tmpl);
    std::string token;
    while (in >> token) out.push_back(token);
    return out;
}

void substitute(std::vector<std::string>& argv, const std::string& key,
                const std::string& value) {
    for (std::string& token : argv) {
        std::size_t pos;
        while ((pos = token.find(key)) != std::string::npos) {
            token.replace(pos, key.size(), value);
        }
    }
}

std::vector<DiagRule> rules_for(const ToolchainConfig& cfg) {
    if (!cfg.diag_rules.empty()) return load_diag_rules(cfg.diag_rules);
    return default_diag_rules();
}

CompileResult compile_scripted(const SourceFile& src, const ToolchainConfig& cfg) {
    std::ifstream in(cfg.script_path);
    if (!in) {
        raise(Errc::ToolchainUnavailable, "cannot read script " + cfg.script_path.string());
    }
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
        raise(Errc::ToolchainUnavailable, "malformed script " + cfg.script_path.string());
    }
    std::string digest = src.digest();
    nlohmann::json entry;
    if (doc.contains("by_digest") && doc["by_digest"].contains(digest)) {
        entry = doc["by_digest"][digest];
    } else if (doc.contains("default")) {
        entry = doc["default"];
    } else {
        raise(Errc::ToolchainUnavailable,
              "script has no entry for digest " + digest + " and no default");
    }

    CompileResult result;
    result.ok = entry.value("ok", false);
    result.diagnostics = entry.value("diagnostics", "");
    if (result.ok) {
        std::filesystem::create_directories(cfg.workdir);
        result.artifact = cfg.workdir / (digest + ".bin");
        std::ofstream artifact(result.artifact, std::ios::binary);
        artifact << src.text;
    } else {
        if (result.diagnostics.empty()) result.diagnostics = "compilation failed (scripted)";
        result.categories = classify_diagnostics(result.diagnostics, rules_for(cfg));
        if (result.categories.empty()) result.categories.insert(DiagCategory::Other);
    }
    return result;
}

CompileResult compile_external(const SourceFile& src, const ToolchainConfig& cfg) {
    namespace fs = std::filesystem;
    std::string digest = src.digest();
    fs::path job_dir = cfg.workdir / digest;
    fs::create_directories(job_dir);
    fs::path src_path = job_dir / cfg.source_name;
    {
        std::ofstream out(src_path, std::ios::binary);
        out << src.text;
    }
    fs::path out_path = job_dir / "artifact.bin";

    std::vector<std::string> argv = split_command(cfg.compile_cmd);
    substitute(argv, "{src}", src_path.string());
    substitute(argv, "{out}", out_path.string());
    if (argv.empty()) raise(Errc::ConfigError, "empty compile command");
    if (!find_executable(argv[0])) {
        raise(Errc::ToolchainUnavailable, "compiler '" + argv[0] + "' not found");
    }

    RunResult run = run_argv(argv, cfg.compile_timeout_s, job_dir);

    CompileResult result;
    result.diagnostics = run.output;
    if (run.timed_out) {
        result.diagnostics += "\n[compile timed out after " +
                              std::to_string(static_cast<long>(cfg.compile_timeout_s)) + " s]";
        result.categories.insert(DiagCategory::Timeout);
        return result;
    }
    if (run.exit_code == 0 && fs::exists(out_path)) {
        result.ok = true;
        result.artifact = out_path;
        return result;
    }
    if (run.exit_code == 0) {
        result.diagnostics += "\n[compiler exited cleanly but produced no artifact]";
    }
    if (result.diagnostics.empty()) {
        result.diagnostics = "compiler exited with status " + std::to_string(run.exit_code);
    }
    result.categories = classify_diagnostics(result.diagnostics, rules_for(cfg));
    if (result.categories.empty()) result.categories.insert(DiagCategory::Other);
    return result;
}

}  // namespace

CompileResult compile(const SourceFile& src, const ToolchainConfig& cfg) {
    cfg.validate();
    if (src.text.empty()) raise(Errc::InvalidArgument, "source text is empty");
    if (cfg.kind == ToolchainKind::Scripted) return compile_scripted(src, cfg);
    return compile_external(src, cfg);
}

void upload(const std::filesystem::path& artifact, const DeviceRef& device,
            const ToolchainConfig& cfg) {
    if (!std::filesystem::exists(artifact)) {
        raise(Errc::InvalidArgument, "artifact " + artifact.string() + " does not exist");
    }
    if (device.kind == DeviceRef::Kind::Simulated) {
        return;  // binding the trial to the simulator needs no transfer
    }
    if (cfg.upload_cmd.empty()) raise(Errc::ConfigError, "upload_cmd is empty");
    std::vector<std::string> argv = split_command(cfg.upload_cmd);
    substitute(argv, "{artifact}", artifact.string());
    substitute(argv, "{port}", device.physical.port);
    if (!find_executable(argv[0])) {
        raise(Errc::ToolchainUnavailable, "uploader '" + argv[0] + "' not found");
    }
    RunResult run = run_argv(argv, cfg.upload_timeout_s);
    if (run.timed_out) {
        raise(Errc::UploadFailed, "upload timed out\n" + run.output);
    }
    if (run.exit_code != 0) {
        raise(Errc::UploadFailed,
              "uploader exited with status " + std::to_string(run.exit_code) + "\n" + run.output);
    }
}

}  // namespace hilbench
