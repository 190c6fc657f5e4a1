#include "hilbench/extract.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hilbench/detail/digest.hpp"
#include "hilbench/detail/numfmt.hpp"

namespace hilbench {

std::string SourceFile::digest() const {
    return detail::hex16(detail::fnv1a64(text));
}

namespace {

struct Line {
    std::string_view body;     // without the terminator
    bool fence = false;
    std::string_view lang;     // text after the backticks, trimmed
};

std::vector<Line> scan_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view body;
        if (nl == std::string_view::npos) {
            if (start >= text.size()) break;
            body = text.substr(start);
            start = text.size() + 1;
        } else {
            body = text.substr(start, nl - start);
            start = nl + 1;
        }
        Line line{body, false, {}};
        std::string_view probe = body;
        if (!probe.empty() && probe.back() == '\r') probe.remove_suffix(1);
        std::size_t indent = probe.find_first_not_of(" \t");
        if (indent != std::string_view::npos && probe.substr(indent).starts_with("```")) {
            line.fence = true;
            std::string_view rest = probe.substr(indent + 3);
            while (!rest.empty() && rest.front() == '`') rest.remove_prefix(1);
            line.lang = detail::trim(rest);
        }
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

SourceFile extract_source(std::string_view response, bool pass_through) {
    SourceFile out;
    std::vector<std::string> blocks;
    bool open = false;
    std::string current;
    bool first_line_in_block = true;

    for (const Line& line : scan_lines(response)) {
        if (line.fence) {
            if (!open) {
                open = true;
                current.clear();
                first_line_in_block = true;
                out.fence_langs.emplace_back(line.lang);
            } else {
                open = false;
                blocks.push_back(current);
            }
            continue;
        }
        if (open) {
            if (!first_line_in_block) current += '\n';
            current.append(line.body);
            first_line_in_block = false;
        }
    }
    if (open) raise(Errc::UnterminatedFence, "code fence never closed");

    if (blocks.empty()) {
        if (pass_through) {
            out.text.assign(response);
            out.origin = SourceOrigin::PassedThrough;
            out.block_count = 0;
            if (detail::trim(out.text).empty()) {
                raise(Errc::NoCodeBlocks, "response is empty");
            }
            return out;
        }
        raise(Errc::NoCodeBlocks, "response has no fenced code block");
    }

    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i) out.text += "\n\n";
        out.text += blocks[i];
    }
    out.block_count = static_cast<int>(blocks.size());
    out.origin = SourceOrigin::Extracted;
    if (detail::trim(out.text).empty()) {
        raise(Errc::NoCodeBlocks, "fenced blocks are empty");
    }
    return out;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::MissingExpectation, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

CorpusReport fixture_corpus_check(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        raise(Errc::MissingExpectation, dir.string() + " is not a directory");
    }
    std::vector<fs::path> responses;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.ends_with(".response.txt")) responses.push_back(entry.path());
    }
    std::sort(responses.begin(), responses.end());
    if (responses.empty()) {
        raise(Errc::MissingExpectation, "no *.response.txt fixtures in " + dir.string());
    }

    CorpusReport report;
    for (const fs::path& rp : responses) {
        std::string stem = rp.filename().string();
        stem.resize(stem.size() - std::string(".response.txt").size());
        fs::path ep = rp.parent_path() / (stem + ".expected.txt");
        if (!fs::exists(ep)) {
            raise(Errc::MissingExpectation, "no expectation for fixture '" + stem + "'");
        }
        ++report.total;
        std::string expected = read_file(ep);
        try {
            SourceFile got = extract_source(read_file(rp));
            if (got.text == expected) {
                ++report.matched;
            } else {
                report.mismatches.push_back(stem);
            }
        } catch (const Error& e) {
            report.mismatches.push_back(stem + " (" + e.what() + ")");
        }
    }
    return report;
}

}  // namespace hilbench
