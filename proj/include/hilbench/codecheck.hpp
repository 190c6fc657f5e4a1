#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hilbench/extract.hpp"

namespace hilbench {

struct RegisterDef {
    std::string name;
    unsigned address = 0;
    std::string description;
};

struct ScaleMode {
    std::string config_register;  // hex text of the register it is written to
    unsigned config_value = 0;
    double expected_constant = 0.0;  // conversion factor firmware must use
};

// Ground truth for one chip: strapping-dependent bus addresses, the register
// file, and per-mode scale constants. The text form doubles as prompt
// context.
struct RegisterMap {
    std::string chip;
    std::map<std::string, unsigned> i2c_addresses;  // strapping -> 7-bit address
    std::vector<RegisterDef> registers;
    std::map<std::string, ScaleMode> scales;  // mode name -> entry

    void validate() const;
    bool has_register(unsigned address) const;

    static RegisterMap parse(std::string_view text);
    static RegisterMap load(const std::filesystem::path& path);
    std::string to_text() const;
};

enum class FindingKind {
    WrongI2CAddress,
    HallucinatedRegister,
    ScaleMismatch,
    MixedLibraries,
};

const char* finding_kind_name(FindingKind kind);
FindingKind finding_kind_from(const std::string& name);

enum class Confidence { Exact, Heuristic };

struct Finding {
    FindingKind kind = FindingKind::WrongI2CAddress;
    int line = 0;
    Confidence confidence = Confidence::Exact;
    long long found = 0;
    long long expected = 0;
    double found_real = 0.0;
    double expected_real = 0.0;
    std::vector<std::string> names;  // MixedLibraries set names

    std::string describe() const;
};

struct IntLiteral {
    long long value = 0;
    bool is_hex = false;
    int line = 0;
    bool in_comment = false;
    std::vector<std::string> context_before;  // nearest-first preceding tokens
};

// Hexadecimal and decimal integer literals with their token context. Comments
// are scanned too (flagged), string contents are not.
std::vector<IntLiteral> scan_literals(const SourceFile& src, int context_window = 3);

struct CheckOptions {
    int context_window = 3;
    std::vector<std::string> bus_begin_idents = {"beginTransmission", "requestFrom"};
    std::vector<std::string> addr_ident_hints = {"ADDR", "ADDRESS"};
    std::vector<std::string> reg_rw_idents = {"write",    "read",     "writeRegister",
                                              "readRegister", "writeReg", "readReg",
                                              "writeByte", "readByte", "writeTo", "readFrom"};
    double scale_tolerance = 0.02;
    unsigned i2c_min = 0x08;
    unsigned i2c_max = 0x77;
};

// Silent when the strapping's expected address appears in a bus context;
// one finding otherwise (provided some bus-addressed literal exists at all).
std::vector<Finding> check_i2c_address(const SourceFile& src, const RegisterMap& map,
                                       const std::string& strapping,
                                       const CheckOptions& opts = {});

// Every register read/write literal that is neither a known register nor a
// known configuration value is reported.
std::vector<Finding> check_register_hallucination(const SourceFile& src, const RegisterMap& map,
                                                  const CheckOptions& opts = {});

// Flags a different mode's conversion constant when the expected one is
// absent. Numeric near-matching keeps this Heuristic by nature.
std::vector<Finding> check_scale_constant(const SourceFile& src, const RegisterMap& map,
                                          const std::string& mode, const CheckOptions& opts = {});

struct LibrarySets {
    std::map<std::string, std::vector<std::string>> sets;  // name -> identifying substrings

    static LibrarySets load(const std::filesystem::path& path);
};

// Mutually exclusive driver stacks spliced into one source file.
std::vector<Finding> check_mixed_libraries(const SourceFile& src, const LibrarySets& sets,
                                           const CheckOptions& opts = {});

std::vector<Finding> run_all_checks(const SourceFile& src, const RegisterMap& map,
                                    const std::optional<std::string>& strapping,
                                    const std::optional<std::string>& mode,
                                    const std::optional<LibrarySets>& sets,
                                    const CheckOptions& opts = {});

}  // namespace hilbench
