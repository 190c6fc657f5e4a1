#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hilbench/error.hpp"

namespace hilbench {

struct Sample {
    double t = 0.0;
    double value = 0.0;
};

struct Channel {
    std::string label;
    std::vector<Sample> samples;

    std::vector<double> values() const;
};

struct Trace {
    std::vector<Channel> channels;
    std::string source_id;
    std::map<std::string, std::string> meta;

    const Channel* find_channel(std::string_view label) const;
    std::size_t total_samples() const;
};

enum class SerialKind {
    UnlabeledLines,  // one bare decimal per line: "233\n512\n..."
    LabeledLines,    // "A_X = -0.426" style, case sensitive labels
};

struct SerialFormat {
    SerialKind kind = SerialKind::UnlabeledLines;
    std::vector<std::string> labels;  // LabeledLines only, in emission order
    double sample_period = 0.1;       // nominal seconds between lines of one channel

    void validate() const;
};

// Lines that fail the expected pattern are skipped and counted in
// meta["skipped_lines"]; meta["total_lines"] holds the overall line count.
// Timestamps are line_index * sample_period per channel.
Trace parse_serial(std::string_view text, const SerialFormat& fmt);

// Inverse of parse_serial for well-formed traces; values are emitted in the
// shortest decimal form that parses back exactly.
std::string format_serial(const Trace& trace, const SerialFormat& fmt);

// Samples with t0 <= t < t1. Keeps labels, source_id and meta.
Trace window(const Trace& trace, double t0, double t1);

}  // namespace hilbench
