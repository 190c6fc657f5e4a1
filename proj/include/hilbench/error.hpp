#pragma once

#include <stdexcept>
#include <string>

namespace hilbench {

// Failure kinds surfaced across the pipeline. Tests and the campaign driver
// match on the code, never on the message text.
enum class Errc {
    // serial parsing / traces
    NoSamples,
    ChannelImbalance,
    LabelMismatch,
    EmptyWindow,
    // alignment
    LengthMismatch,
    EmptySeries,
    ChannelMismatch,
    // response extraction
    NoCodeBlocks,
    UnterminatedFence,
    MissingExpectation,
    // prompts / providers
    MissingPlaceholder,
    UnknownParam,
    Transport,
    ReplayMiss,
    AuthMissing,
    // toolchain / devices
    ToolchainUnavailable,
    UploadFailed,
    PortUnavailable,
    LeaseViolation,
    UnknownCommand,
    // static source checks
    UnknownStrapping,
    UnknownMode,
    // campaign / config
    CorruptRecord,
    ConfigError,
    // generic precondition violations
    InvalidArgument,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace hilbench
