#include "hilbench/timeseries.hpp"

#include <algorithm>
#include <limits>

#include "hilbench/detail/numfmt.hpp"

namespace hilbench {

using detail::format_double;
using detail::parse_strict_double;
using detail::trim;

std::vector<double> Channel::values() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const Sample& s : samples) out.push_back(s.value);
    return out;
}

const Channel* Trace::find_channel(std::string_view label) const {
    for (const Channel& c : channels) {
        if (c.label == label) return &c;
    }
    return nullptr;
}

std::size_t Trace::total_samples() const {
    std::size_t n = 0;
    for (const Channel& c : channels) n += c.samples.size();
    return n;
}

void SerialFormat::validate() const {
    if (sample_period <= 0.0) {
        raise(Errc::InvalidArgument, "sample_period must be positive");
    }
    if (kind == SerialKind::LabeledLines) {
        if (labels.empty()) {
            raise(Errc::InvalidArgument, "LabeledLines needs at least one label");
        }
        for (const std::string& l : labels) {
            if (trim(l) != l || l.empty()) {
                raise(Errc::InvalidArgument, "bad label '" + l + "'");
            }
            if (std::count(labels.begin(), labels.end(), l) != 1) {
                raise(Errc::InvalidArgument, "duplicate label '" + l + "'");
            }
        }
    } else if (!labels.empty()) {
        raise(Errc::InvalidArgument, "UnlabeledLines takes no labels");
    }
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

// "<label><spaces>=<spaces><decimal>"; returns label index or npos.
std::size_t match_labeled_line(std::string_view line, const std::vector<std::string>& labels,
                               double& value_out) {
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) return std::string_view::npos;
    std::string_view label = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (label == labels[i]) {
            auto parsed = parse_strict_double(value);
            if (!parsed) return std::string_view::npos;
            value_out = *parsed;
            return i;
        }
    }
    return std::string_view::npos;
}

}  // namespace

Trace parse_serial(std::string_view text, const SerialFormat& fmt) {
    fmt.validate();

    Trace trace;
    if (fmt.kind == SerialKind::UnlabeledLines) {
        trace.channels.push_back(Channel{"", {}});
    } else {
        for (const std::string& l : fmt.labels) trace.channels.push_back(Channel{l, {}});
    }

    std::size_t total = 0;
    std::size_t skipped = 0;
    for (std::string_view raw : split_lines(text)) {
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        ++total;
        if (fmt.kind == SerialKind::UnlabeledLines) {
            auto parsed = parse_strict_double(trim(raw));
            if (!parsed) {
                ++skipped;
                continue;
            }
            Channel& c = trace.channels[0];
            double t = static_cast<double>(c.samples.size()) * fmt.sample_period;
            c.samples.push_back(Sample{t, *parsed});
        } else {
            double value = 0.0;
            std::size_t idx = match_labeled_line(raw, fmt.labels, value);
            if (idx == std::string_view::npos) {
                ++skipped;
                continue;
            }
            Channel& c = trace.channels[idx];
            double t = static_cast<double>(c.samples.size()) * fmt.sample_period;
            c.samples.push_back(Sample{t, value});
        }
    }

    trace.meta["total_lines"] = std::to_string(total);
    trace.meta["skipped_lines"] = std::to_string(skipped);

    std::size_t parsed_total = trace.total_samples();
    if (parsed_total == 0) {
        raise(Errc::NoSamples, "no line matched the serial format (" +
                                   std::to_string(total) + " lines seen)");
    }

    if (fmt.kind == SerialKind::LabeledLines) {
        std::size_t min_len = std::numeric_limits<std::size_t>::max();
        std::size_t max_len = 0;
        for (const Channel& c : trace.channels) {
            min_len = std::min(min_len, c.samples.size());
            max_len = std::max(max_len, c.samples.size());
        }
        if (max_len - min_len > 1) {
            raise(Errc::ChannelImbalance,
                  "channel sample counts differ by " + std::to_string(max_len - min_len));
        }
        for (Channel& c : trace.channels) c.samples.resize(min_len);
        if (min_len == 0) {
            raise(Errc::NoSamples, "a labeled channel never appeared");
        }
    }
    return trace;
}

std::string format_serial(const Trace& trace, const SerialFormat& fmt) {
    fmt.validate();
    std::string out;

    if (fmt.kind == SerialKind::UnlabeledLines) {
        if (trace.channels.size() != 1 || !trace.channels[0].label.empty()) {
            raise(Errc::LabelMismatch, "UnlabeledLines wants a single unlabeled channel");
        }
        for (const Sample& s : trace.channels[0].samples) {
            out += format_double(s.value);
            out += '\n';
        }
        return out;
    }

    if (trace.channels.size() != fmt.labels.size()) {
        raise(Errc::LabelMismatch, "trace has " + std::to_string(trace.channels.size()) +
                                       " channels, format wants " +
                                       std::to_string(fmt.labels.size()));
    }
    std::vector<const Channel*> ordered;
    std::size_t max_len = 0;
    for (const std::string& l : fmt.labels) {
        const Channel* c = trace.find_channel(l);
        if (!c) raise(Errc::LabelMismatch, "trace has no channel '" + l + "'");
        ordered.push_back(c);
        max_len = std::max(max_len, c->samples.size());
    }
    for (std::size_t k = 0; k < max_len; ++k) {
        for (std::size_t i = 0; i < ordered.size(); ++i) {
            if (k >= ordered[i]->samples.size()) continue;
            out += fmt.labels[i];
            out += " = ";
            out += format_double(ordered[i]->samples[k].value);
            out += '\n';
        }
    }
    return out;
}

Trace window(const Trace& trace, double t0, double t1) {
    if (!(t0 < t1)) raise(Errc::InvalidArgument, "window needs t0 < t1");
    Trace out;
    out.source_id = trace.source_id;
    out.meta = trace.meta;
    for (const Channel& c : trace.channels) {
        Channel wc;
        wc.label = c.label;
        for (const Sample& s : c.samples) {
            if (s.t >= t0 && s.t < t1) wc.samples.push_back(s);
        }
        if (wc.samples.empty()) {
            raise(Errc::EmptyWindow, "channel '" + c.label + "' has no samples in [" +
                                         detail::format_double(t0) + ", " +
                                         detail::format_double(t1) + ")");
        }
        out.channels.push_back(std::move(wc));
    }
    return out;
}

}  // namespace hilbench
