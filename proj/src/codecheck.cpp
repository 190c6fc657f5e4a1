#include "hilbench/codecheck.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hilbench/detail/numfmt.hpp"

namespace hilbench {

void RegisterMap::validate() const {
    if (chip.empty()) raise(Errc::ConfigError, "register map has no chip name");
    for (const auto& [strapping, addr] : i2c_addresses) {
        if (addr < 0x08 || addr > 0x77) {
            raise(Errc::ConfigError, "address for '" + strapping + "' outside the 7-bit range");
        }
    }
    std::vector<unsigned> addrs;
    std::vector<std::string> names;
    for (const RegisterDef& r : registers) {
        addrs.push_back(r.address);
        names.push_back(r.name);
    }
    std::sort(addrs.begin(), addrs.end());
    if (std::adjacent_find(addrs.begin(), addrs.end()) != addrs.end()) {
        raise(Errc::ConfigError, "duplicate register address");
    }
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
        raise(Errc::ConfigError, "duplicate register name");
    }
    for (const auto& [mode, entry] : scales) {
        unsigned reg = static_cast<unsigned>(std::strtoul(entry.config_register.c_str(), nullptr, 16));
        if (!has_register(reg)) {
            raise(Errc::ConfigError, "scale mode '" + mode + "' writes unknown register " +
                                         entry.config_register);
        }
        if (entry.expected_constant <= 0.0) {
            raise(Errc::ConfigError, "scale mode '" + mode + "' has no positive constant");
        }
    }
}

bool RegisterMap::has_register(unsigned address) const {
    for (const RegisterDef& r : registers) {
        if (r.address == address) return true;
    }
    return false;
}

namespace {

std::string hex_byte(unsigned v) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "0x%02X", v);
    return buf;
}

std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

unsigned parse_hex_byte(const std::string& text, const char* what) {
    char* end = nullptr;
    unsigned long v = std::strtoul(text.c_str(), &end, 16);
    if (end == text.c_str() || *end != '\0' || v > 0xFF) {
        raise(Errc::ConfigError, std::string("bad ") + what + " '" + text + "'");
    }
    return static_cast<unsigned>(v);
}

}  // namespace

RegisterMap RegisterMap::parse(std::string_view text) {
    RegisterMap map;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = std::string(line.substr(1, line.size() - 2));
            continue;
        }
        if (line.starts_with("chip:")) {
            map.chip = std::string(detail::trim(line.substr(5)));
            continue;
        }
        std::vector<std::string> fields = split_ws(line);
        if (section == "addresses") {
            if (fields.size() != 2) raise(Errc::ConfigError, "bad address line '" + raw + "'");
            map.i2c_addresses[fields[0]] = parse_hex_byte(fields[1], "i2c address");
        } else if (section == "registers") {
            if (fields.size() < 2) raise(Errc::ConfigError, "bad register line '" + raw + "'");
            RegisterDef def;
            def.address = parse_hex_byte(fields[0], "register address");
            def.name = fields[1];
            for (std::size_t i = 2; i < fields.size(); ++i) {
                if (i > 2) def.description += ' ';
                def.description += fields[i];
            }
            map.registers.push_back(std::move(def));
        } else if (section == "scales") {
            if (fields.size() != 4) raise(Errc::ConfigError, "bad scale line '" + raw + "'");
            ScaleMode mode;
            mode.config_register = fields[1];
            mode.config_value = parse_hex_byte(fields[2], "config value");
            mode.expected_constant = std::strtod(fields[3].c_str(), nullptr);
            map.scales[fields[0]] = std::move(mode);
        } else {
            raise(Errc::ConfigError, "line outside any section: '" + raw + "'");
        }
    }
    map.validate();
    return map;
}

RegisterMap RegisterMap::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::ConfigError, "cannot read register map " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string RegisterMap::to_text() const {
    std::string out = "chip: " + chip + "\n\n[addresses]\n";
    for (const auto& [strapping, addr] : i2c_addresses) {
        out += strapping + " " + hex_byte(addr) + "\n";
    }
    out += "\n[registers]\n";
    for (const RegisterDef& r : registers) {
        out += hex_byte(r.address) + " " + r.name;
        if (!r.description.empty()) out += " " + r.description;
        out += "\n";
    }
    out += "\n[scales]\n";
    for (const auto& [mode, entry] : scales) {
        out += mode + " " + entry.config_register + " " + hex_byte(entry.config_value) + " " +
               detail::format_double(entry.expected_constant) + "\n";
    }
    return out;
}

const char* finding_kind_name(FindingKind kind) {
    switch (kind) {
        case FindingKind::WrongI2CAddress: return "WrongI2CAddress";
        case FindingKind::HallucinatedRegister: return "HallucinatedRegister";
        case FindingKind::ScaleMismatch: return "ScaleMismatch";
        case FindingKind::MixedLibraries: return "MixedLibraries";
    }
    return "WrongI2CAddress";
}

FindingKind finding_kind_from(const std::string& name) {
    if (name == "WrongI2CAddress") return FindingKind::WrongI2CAddress;
    if (name == "HallucinatedRegister") return FindingKind::HallucinatedRegister;
    if (name == "ScaleMismatch") return FindingKind::ScaleMismatch;
    if (name == "MixedLibraries") return FindingKind::MixedLibraries;
    raise(Errc::InvalidArgument, "unknown finding kind '" + name + "'");
}

std::string Finding::describe() const {
    std::string out = "line " + std::to_string(line) + ": " + finding_kind_name(kind);
    switch (kind) {
        case FindingKind::WrongI2CAddress:
            out += " found " + hex_byte(static_cast<unsigned>(found)) + " expected " +
                   hex_byte(static_cast<unsigned>(expected));
            break;
        case FindingKind::HallucinatedRegister:
            out += " " + hex_byte(static_cast<unsigned>(found));
            break;
        case FindingKind::ScaleMismatch:
            out += " found " + detail::format_double(found_real) + " expected " +
                   detail::format_double(expected_real);
            break;
        case FindingKind::MixedLibraries:
            for (std::size_t i = 0; i < names.size(); ++i) {
                out += (i ? " + " : " ") + names[i];
            }
            break;
    }
    out += confidence == Confidence::Exact ? " [Exact]" : " [Heuristic]";
    return out;
}

// --- tokenizer ---

namespace {

struct Token {
    std::string text;
    int line = 1;
    bool in_comment = false;
    bool is_number = false;
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Comments are tokenized (flagged); string and char literal contents are
// skipped outright.
std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    int line = 1;
    bool in_block_comment = false;
    bool in_line_comment = false;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            in_line_comment = false;
            ++i;
            continue;
        }
        if (in_block_comment) {
            if (c == '*' && i + 1 < text.size() && text[i + 1] == '/') {
                in_block_comment = false;
                i += 2;
                continue;
            }
        } else if (!in_line_comment) {
            if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
                in_line_comment = true;
                i += 2;
                continue;
            }
            if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
                in_block_comment = true;
                i += 2;
                continue;
            }
            if (c == '"' || c == '\'') {
                char quote = c;
                ++i;
                while (i < text.size() && text[i] != quote) {
                    if (text[i] == '\\' && i + 1 < text.size()) ++i;
                    if (text[i] == '\n') ++line;
                    ++i;
                }
                if (i < text.size()) ++i;
                continue;
            }
        }
        bool commented = in_block_comment || in_line_comment;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j])) ++j;
            tokens.push_back(Token{std::string(text.substr(i, j - i)), line, commented, false});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            if (text[j] == '0' && j + 1 < text.size() && (text[j + 1] == 'x' || text[j + 1] == 'X')) {
                j += 2;
                while (j < text.size() && std::isxdigit(static_cast<unsigned char>(text[j]))) ++j;
            } else {
                while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) ||
                                           text[j] == '.')) {
                    ++j;
                }
                if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                    std::size_t k = j + 1;
                    if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                    if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
                        j = k;
                        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
                            ++j;
                    }
                }
            }
            while (j < text.size() &&
                   (text[j] == 'u' || text[j] == 'U' || text[j] == 'l' || text[j] == 'L' ||
                    text[j] == 'f' || text[j] == 'F')) {
                ++j;
            }
            tokens.push_back(Token{std::string(text.substr(i, j - i)), line, commented, true});
            i = j;
            continue;
        }
        tokens.push_back(Token{std::string(1, c), line, commented, false});
        ++i;
    }
    return tokens;
}

std::string strip_suffix(const std::string& number) {
    std::size_t end = number.size();
    while (end > 0 && std::strchr("uUlLfF", number[end - 1])) --end;
    return number.substr(0, end);
}

bool parse_int_literal(const std::string& token, long long& value, bool& is_hex) {
    std::string body = strip_suffix(token);
    if (body.find('.') != std::string::npos) return false;
    if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
        value = std::strtoll(body.c_str() + 2, nullptr, 16);
        is_hex = true;
        return true;
    }
    if (body.find('e') != std::string::npos || body.find('E') != std::string::npos) return false;
    value = std::strtoll(body.c_str(), nullptr, 10);
    is_hex = false;
    return true;
}

bool parse_real_literal(const std::string& token, double& value) {
    std::string body = strip_suffix(token);
    if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) return false;
    bool real = body.find('.') != std::string::npos ||
                body.find('e') != std::string::npos || body.find('E') != std::string::npos;
    if (!real) return false;
    value = std::strtod(body.c_str(), nullptr);
    return true;
}

std::vector<std::string> context_before(const std::vector<Token>& tokens, std::size_t idx,
                                        int window) {
    std::vector<std::string> out;
    for (int back = 1; back <= window && idx >= static_cast<std::size_t>(back); ++back) {
        out.push_back(tokens[idx - static_cast<std::size_t>(back)].text);
    }
    return out;
}

bool context_has(const std::vector<std::string>& context, const std::vector<std::string>& wanted) {
    for (const std::string& c : context) {
        for (const std::string& w : wanted) {
            if (c == w) return true;
        }
    }
    return false;
}

bool context_has_hint(const std::vector<std::string>& context,
                      const std::vector<std::string>& hints) {
    for (const std::string& c : context) {
        std::string upper;
        for (char ch : c) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        for (const std::string& h : hints) {
            if (upper.find(h) != std::string::npos) return true;
        }
    }
    return false;
}

}  // namespace

std::vector<IntLiteral> scan_literals(const SourceFile& src, int context_window) {
    std::vector<Token> tokens = tokenize(src.text);
    std::vector<IntLiteral> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!tokens[i].is_number) continue;
        IntLiteral lit;
        if (!parse_int_literal(tokens[i].text, lit.value, lit.is_hex)) continue;
        lit.line = tokens[i].line;
        lit.in_comment = tokens[i].in_comment;
        lit.context_before = context_before(tokens, i, context_window);
        out.push_back(std::move(lit));
    }
    return out;
}

std::vector<Finding> check_i2c_address(const SourceFile& src, const RegisterMap& map,
                                       const std::string& strapping, const CheckOptions& opts) {
    auto it = map.i2c_addresses.find(strapping);
    if (it == map.i2c_addresses.end()) {
        raise(Errc::UnknownStrapping, "map has no strapping '" + strapping + "'");
    }
    long long expected = it->second;

    std::vector<IntLiteral> candidates;
    for (const IntLiteral& lit : scan_literals(src, opts.context_window)) {
        if (lit.value < opts.i2c_min || lit.value > opts.i2c_max) continue;
        if (!context_has(lit.context_before, opts.bus_begin_idents) &&
            !context_has_hint(lit.context_before, opts.addr_ident_hints)) {
            continue;
        }
        candidates.push_back(lit);
    }
    if (candidates.empty()) return {};
    for (const IntLiteral& lit : candidates) {
        if (lit.value == expected) return {};
    }
    const IntLiteral* pick = &candidates.front();
    for (const IntLiteral& lit : candidates) {
        if (!lit.in_comment) {
            pick = &lit;
            break;
        }
    }
    Finding f;
    f.kind = FindingKind::WrongI2CAddress;
    f.line = pick->line;
    f.found = pick->value;
    f.expected = expected;
    f.confidence = pick->in_comment ? Confidence::Heuristic : Confidence::Exact;
    return {f};
}

std::vector<Finding> check_register_hallucination(const SourceFile& src, const RegisterMap& map,
                                                  const CheckOptions& opts) {
    if (map.registers.empty()) raise(Errc::InvalidArgument, "register map has no registers");
    std::vector<long long> known;
    for (const RegisterDef& r : map.registers) known.push_back(r.address);
    for (const auto& [_, entry] : map.scales) known.push_back(entry.config_value);

    std::vector<Finding> findings;
    for (const IntLiteral& lit : scan_literals(src, opts.context_window)) {
        if (!context_has(lit.context_before, opts.reg_rw_idents)) continue;
        if (std::find(known.begin(), known.end(), lit.value) != known.end()) continue;
        Finding f;
        f.kind = FindingKind::HallucinatedRegister;
        f.line = lit.line;
        f.found = lit.value;
        f.confidence = lit.in_comment ? Confidence::Heuristic : Confidence::Exact;
        findings.push_back(f);
    }
    return findings;
}

std::vector<Finding> check_scale_constant(const SourceFile& src, const RegisterMap& map,
                                          const std::string& mode, const CheckOptions& opts) {
    auto it = map.scales.find(mode);
    if (it == map.scales.end()) raise(Errc::UnknownMode, "map has no scale mode '" + mode + "'");
    double expected = it->second.expected_constant;

    struct RealHit {
        double value;
        int line;
        bool in_comment;
    };
    std::vector<RealHit> reals;
    for (const Token& tok : tokenize(src.text)) {
        if (!tok.is_number) continue;
        double v = 0.0;
        if (parse_real_literal(tok.text, v)) reals.push_back({v, tok.line, tok.in_comment});
    }

    auto matches = [&](double lit, double constant) {
        return std::abs(lit - constant) <= opts.scale_tolerance * std::abs(constant);
    };
    for (const RealHit& hit : reals) {
        if (matches(hit.value, expected)) return {};
    }
    for (const auto& [other_mode, entry] : map.scales) {
        if (other_mode == mode) continue;
        for (const RealHit& hit : reals) {
            if (matches(hit.value, entry.expected_constant)) {
                Finding f;
                f.kind = FindingKind::ScaleMismatch;
                f.line = hit.line;
                f.found_real = hit.value;
                f.expected_real = expected;
                f.confidence = Confidence::Heuristic;
                return {f};
            }
        }
    }
    return {};
}

LibrarySets LibrarySets::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::ConfigError, "cannot read library sets " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.contains("sets")) {
        raise(Errc::ConfigError, "library sets file needs a 'sets' object");
    }
    LibrarySets sets;
    for (const auto& [name, members] : doc["sets"].items()) {
        sets.sets[name] = members.get<std::vector<std::string>>();
    }
    return sets;
}

std::vector<Finding> check_mixed_libraries(const SourceFile& src, const LibrarySets& sets,
                                           const CheckOptions&) {
    struct Hit {
        std::string set_name;
        int line;
        bool in_comment;
    };
    std::vector<Hit> hits;

    // Line scan with comment tracking; member names may contain characters
    // the tokenizer splits (header names with dots).
    std::vector<std::pair<std::string, bool>> lines;  // text, starts inside block comment
    {
        bool in_block = false;
        std::istringstream in(src.text);
        std::string line;
        while (std::getline(in, line)) {
            lines.emplace_back(line, in_block);
            for (std::size_t i = 0; i + 1 < line.size(); ++i) {
                if (!in_block && line[i] == '/' && line[i + 1] == '*') in_block = true;
                if (in_block && line[i] == '*' && line[i + 1] == '/') in_block = false;
                if (!in_block && line[i] == '/' && line[i + 1] == '/') break;
            }
        }
    }

    for (const auto& [set_name, members] : sets.sets) {
        bool found = false;
        for (std::size_t li = 0; li < lines.size() && !found; ++li) {
            const auto& [text, starts_commented] = lines[li];
            for (const std::string& member : members) {
                std::size_t pos = text.find(member);
                if (pos == std::string::npos) continue;
                bool commented = starts_commented;
                std::size_t line_comment = text.find("//");
                if (line_comment != std::string::npos && line_comment < pos) commented = true;
                hits.push_back({set_name, static_cast<int>(li + 1), commented});
                found = true;
                break;
            }
        }
    }

    if (hits.size() < 2) return {};
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.line < b.line; });
    Finding f;
    f.kind = FindingKind::MixedLibraries;
    f.line = hits[1].line;  // where the second stack enters
    f.confidence = Confidence::Exact;
    for (const Hit& h : hits) {
        f.names.push_back(h.set_name);
        if (h.in_comment) f.confidence = Confidence::Heuristic;
    }
    std::sort(f.names.begin(), f.names.end());
    return {f};
}

std::vector<Finding> run_all_checks(const SourceFile& src, const RegisterMap& map,
                                    const std::optional<std::string>& strapping,
                                    const std::optional<std::string>& mode,
                                    const std::optional<LibrarySets>& sets,
                                    const CheckOptions& opts) {
    std::vector<Finding> findings;
    auto append = [&](std::vector<Finding> more) {
        findings.insert(findings.end(), more.begin(), more.end());
    };
    if (strapping) append(check_i2c_address(src, map, *strapping, opts));
    if (!map.registers.empty()) append(check_register_hallucination(src, map, opts));
    if (mode) append(check_scale_constant(src, map, *mode, opts));
    if (sets) append(check_mixed_libraries(src, *sets, opts));
    return findings;
}

}  // namespace hilbench
