#include "hilbench/error.hpp"

namespace hilbench {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::NoSamples: return "NoSamples";
        case Errc::ChannelImbalance: return "ChannelImbalance";
        case Errc::LabelMismatch: return "LabelMismatch";
        case Errc::EmptyWindow: return "EmptyWindow";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::EmptySeries: return "EmptySeries";
        case Errc::ChannelMismatch: return "ChannelMismatch";
        case Errc::NoCodeBlocks: return "NoCodeBlocks";
        case Errc::UnterminatedFence: return "UnterminatedFence";
        case Errc::MissingExpectation: return "MissingExpectation";
        case Errc::MissingPlaceholder: return "MissingPlaceholder";
        case Errc::UnknownParam: return "UnknownParam";
        case Errc::Transport: return "Transport";
        case Errc::ReplayMiss: return "ReplayMiss";
        case Errc::AuthMissing: return "AuthMissing";
        case Errc::ToolchainUnavailable: return "ToolchainUnavailable";
        case Errc::UploadFailed: return "UploadFailed";
        case Errc::PortUnavailable: return "PortUnavailable";
        case Errc::LeaseViolation: return "LeaseViolation";
        case Errc::UnknownCommand: return "UnknownCommand";
        case Errc::UnknownStrapping: return "UnknownStrapping";
        case Errc::UnknownMode: return "UnknownMode";
        case Errc::CorruptRecord: return "CorruptRecord";
        case Errc::ConfigError: return "ConfigError";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace hilbench
