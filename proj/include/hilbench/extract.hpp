#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hilbench/error.hpp"

namespace hilbench {

enum class SourceOrigin { Extracted, PassedThrough };

struct SourceFile {
    std::string text;
    int block_count = 0;
    SourceOrigin origin = SourceOrigin::Extracted;
    std::vector<std::string> fence_langs;  // recorded, never filtered on

    std::string digest() const;  // 16 hex chars, stable across runs
};

// Pulls fenced code blocks out of a chat response. A fence opens at a line
// whose first non-space characters are ``` and closes at the next such line;
// multiple blocks are concatenated in order with one blank line between
// them. With pass_through set, a response without fences is used whole.
SourceFile extract_source(std::string_view response, bool pass_through = false);

struct CorpusReport {
    int total = 0;
    int matched = 0;
    std::vector<std::string> mismatches;

    double rate() const { return total == 0 ? 0.0 : static_cast<double>(matched) / total; }
};

// Runs extract_source over every <name>.response.txt in dir and byte-compares
// against <name>.expected.txt.
CorpusReport fixture_corpus_check(const std::filesystem::path& dir);

}  // namespace hilbench
