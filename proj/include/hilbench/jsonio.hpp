#pragma once

// JSON converters shared by the campaign record format and the config loader.

#include <nlohmann/json.hpp>

#include "hilbench/codecheck.hpp"
#include "hilbench/llm.hpp"
#include "hilbench/simbench.hpp"
#include "hilbench/timeseries.hpp"
#include "hilbench/toolchain.hpp"
#include "hilbench/verify.hpp"

namespace hilbench {

void to_json(nlohmann::json& j, const SerialFormat& format);
void from_json(const nlohmann::json& j, SerialFormat& format);

void to_json(nlohmann::json& j, const StimulusModel& model);
void from_json(const nlohmann::json& j, StimulusModel& model);

void to_json(nlohmann::json& j, const DeviceRef& ref);
void from_json(const nlohmann::json& j, DeviceRef& ref);

void to_json(nlohmann::json& j, const VerdictProtocol& protocol);
void from_json(const nlohmann::json& j, VerdictProtocol& protocol);

void to_json(nlohmann::json& j, const ToolchainConfig& config);
void from_json(const nlohmann::json& j, ToolchainConfig& config);

void to_json(nlohmann::json& j, const ProviderRef& ref);
void from_json(const nlohmann::json& j, ProviderRef& ref);

void to_json(nlohmann::json& j, const SourceFile& source);
void from_json(const nlohmann::json& j, SourceFile& source);

void to_json(nlohmann::json& j, const CompileResult& result);
void from_json(const nlohmann::json& j, CompileResult& result);

void to_json(nlohmann::json& j, const StageReport& stage);
void from_json(const nlohmann::json& j, StageReport& stage);

void to_json(nlohmann::json& j, const Verdict& verdict);
void from_json(const nlohmann::json& j, Verdict& verdict);

void to_json(nlohmann::json& j, const Finding& finding);
void from_json(const nlohmann::json& j, Finding& finding);

}  // namespace hilbench
