#include <doctest/doctest.h>

#include <string>
#include <vector>

#include "hilbench/codecheck.hpp"
#include "hilbench/error.hpp"
#include "support/temp.hpp"

using namespace hilbench;

namespace {

const char* kMapText = R"(chip: AXM240

# 7-bit bus addresses by SDO strapping
[addresses]
SDO_GND 0x48
SDO_VDD 0x49

[registers]
0x0F WHO_AM_I device id, reads 0xB5
0x10 CTRL1 power mode and data rate
0x11 CTRL2 full-scale selection
0x28 OUT_X_L
0x29 OUT_X_H
0x2A OUT_Y_L
0x2B OUT_Y_H
0x2C OUT_Z_L
0x2D OUT_Z_H

[scales]
2g 0x11 0x00 0.000061
4g 0x11 0x01 0.000122
8g 0x11 0x02 0.000244
)";

RegisterMap test_map() {
    return RegisterMap::parse(kMapText);
}

SourceFile source_of(const std::string& text) {
    SourceFile src;
    src.text = text;
    src.block_count = 1;
    return src;
}

LibrarySets test_sets() {
    LibrarySets sets;
    sets.sets["adafruit_axm"] = {"Adafruit_AXM240.h", "Adafruit_AXM240"};
    sets.sets["raw_wire"] = {"Wire.h", "Wire.begin"};
    return sets;
}

}  // namespace

TEST_CASE("register maps parse and round trip through their text form") {
    RegisterMap map = test_map();
    CHECK(map.chip == "AXM240");
    CHECK(map.i2c_addresses.at("SDO_GND") == 0x48);
    CHECK(map.i2c_addresses.at("SDO_VDD") == 0x49);
    CHECK(map.registers.size() == 9);
    CHECK(map.has_register(0x0F));
    CHECK(map.has_register(0x2D));
    CHECK_FALSE(map.has_register(0x99));
    CHECK(map.scales.at("4g").expected_constant == 0.000122);
    CHECK(map.scales.at("8g").config_value == 0x02);

    RegisterMap again = RegisterMap::parse(map.to_text());
    CHECK(again.chip == map.chip);
    CHECK(again.i2c_addresses == map.i2c_addresses);
    CHECK(again.registers.size() == map.registers.size());
    CHECK(again.registers[0].name == "WHO_AM_I");
    CHECK(again.registers[0].description == map.registers[0].description);
    CHECK(again.scales.size() == map.scales.size());
    CHECK(again.scales.at("2g").expected_constant == 0.000061);
}

TEST_CASE("register map validation rejects inconsistent tables") {
    RegisterMap map = test_map();
    map.i2c_addresses["BAD"] = 0x80;
    CHECK_THROWS_AS(map.validate(), Error);

    map = test_map();
    map.registers.push_back({"DUP_ADDR", 0x10, ""});
    CHECK_THROWS_AS(map.validate(), Error);

    map = test_map();
    map.registers.push_back({"CTRL1", 0x60, ""});
    CHECK_THROWS_AS(map.validate(), Error);

    map = test_map();
    map.scales["16g"] = ScaleMode{"0x77", 0x03, 0.000488};
    CHECK_THROWS_AS(map.validate(), Error);

    map = test_map();
    map.scales["2g"].expected_constant = 0.0;
    CHECK_THROWS_AS(map.validate(), Error);

    map = test_map();
    map.chip.clear();
    try {
        map.validate();
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ConfigError);
    }
}

TEST_CASE("register map parsing rejects malformed text") {
    CHECK_THROWS_AS(RegisterMap::parse("chip: X\n[addresses]\nGND 0x48 extra\n"), Error);
    CHECK_THROWS_AS(RegisterMap::parse("chip: X\nstray line\n"), Error);
    CHECK_THROWS_AS(RegisterMap::parse("chip: X\n[addresses]\nGND zz\n"), Error);
    CHECK_THROWS_AS(RegisterMap::load("/no/such/map.txt"), Error);

    testsupport::TempDir dir;
    testsupport::write_file(dir / "map.txt", kMapText);
    CHECK(RegisterMap::load(dir / "map.txt").chip == "AXM240");
}

TEST_CASE("the literal scanner reports values, bases, lines, and context") {
    SourceFile src = source_of(
        "#define AXM_ADDR 0x48\n"
        "int rate = 100;\n"
        "// writeRegister(0x99) is wrong\n"
        "float k = 0.000061f;\n");
    auto lits = scan_literals(src);
    REQUIRE(lits.size() == 3);

    CHECK(lits[0].value == 0x48);
    CHECK(lits[0].is_hex);
    CHECK(lits[0].line == 1);
    CHECK_FALSE(lits[0].in_comment);
    REQUIRE(!lits[0].context_before.empty());
    CHECK(lits[0].context_before[0] == "AXM_ADDR");

    CHECK(lits[1].value == 100);
    CHECK_FALSE(lits[1].is_hex);
    CHECK(lits[1].line == 2);

    CHECK(lits[2].value == 0x99);
    CHECK(lits[2].line == 3);
    CHECK(lits[2].in_comment);
}

TEST_CASE("the literal scanner ignores strings and float literals") {
    SourceFile src = source_of(
        "Serial.println(\"address 0x55 and 42\");\n"
        "double g = 9.81;\n"
        "char c = 'x';\n"
        "long big = 1000L;\n");
    auto lits = scan_literals(src);
    REQUIRE(lits.size() == 1);
    CHECK(lits[0].value == 1000);
    CHECK(lits[0].line == 4);
}

TEST_CASE("the right bus address in a bus context stays silent") {
    RegisterMap map = test_map();
    SourceFile src = source_of(
        "void setup() {\n"
        "  Wire.beginTransmission(0x48);\n"
        "  Wire.requestFrom(0x48, 6);\n"
        "}\n");
    CHECK(check_i2c_address(src, map, "SDO_GND").empty());
}

TEST_CASE("the other strapping's address is flagged with both values") {
    RegisterMap map = test_map();
    SourceFile src = source_of("Wire.beginTransmission(0x49);\n");
    auto findings = check_i2c_address(src, map, "SDO_GND");
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].kind == FindingKind::WrongI2CAddress);
    CHECK(findings[0].found == 0x49);
    CHECK(findings[0].expected == 0x48);
    CHECK(findings[0].line == 1);
    CHECK(findings[0].confidence == Confidence::Exact);
}

TEST_CASE("address-looking defines count as bus context") {
    RegisterMap map = test_map();
    SourceFile src = source_of(
        "#define AXM240_ADDRESS 0x49\n"
        "void setup() { Wire.beginTransmission(AXM240_ADDRESS); }\n");
    auto findings = check_i2c_address(src, map, "SDO_GND");
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].found == 0x49);
}

TEST_CASE("no bus-addressed literal at all means no address finding") {
    RegisterMap map = test_map();
    SourceFile src = source_of("int readings = 5;\nfloat scale = 2.5;\n");
    CHECK(check_i2c_address(src, map, "SDO_GND").empty());
    CHECK(check_i2c_address(src, map, "SDO_VDD").empty());
}

TEST_CASE("an address seen only inside a comment is a heuristic finding") {
    RegisterMap map = test_map();
    SourceFile src = source_of("// Wire.beginTransmission(0x49) per the datasheet\n");
    auto findings = check_i2c_address(src, map, "SDO_GND");
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].confidence == Confidence::Heuristic);
}

TEST_CASE("an unknown strapping is rejected") {
    RegisterMap map = test_map();
    SourceFile src = source_of("Wire.beginTransmission(0x48);\n");
    try {
        check_i2c_address(src, map, "SDO_FLOAT");
        FAIL("expected UnknownStrapping");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnknownStrapping);
    }
}

TEST_CASE("register writes to documented registers pass the hallucination check") {
    RegisterMap map = test_map();
    SourceFile src = source_of(
        "writeRegister(0x11, 0x01);\n"
        "uint8_t id = readRegister(0x0F);\n");
    CHECK(check_register_hallucination(src, map).empty());
}

TEST_CASE("undocumented register addresses in rw context are flagged") {
    RegisterMap map = test_map();
    SourceFile src = source_of(
        "writeRegister(0x99, 1);\n"
        "readRegister(0x2C);\n");
    auto findings = check_register_hallucination(src, map);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].kind == FindingKind::HallucinatedRegister);
    CHECK(findings[0].found == 0x99);
    CHECK(findings[0].line == 1);
    CHECK(findings[0].confidence == Confidence::Exact);
}

TEST_CASE("literals outside rw context never count as hallucinated registers") {
    RegisterMap map = test_map();
    SourceFile src = source_of("int threshold = 0x99;\ndelay(0x99);\n");
    CHECK(check_register_hallucination(src, map).empty());
}

TEST_CASE("a commented register write is reported as heuristic") {
    RegisterMap map = test_map();
    SourceFile src = source_of("// writeRegister(0x7A, 1) left from debugging\n");
    auto findings = check_register_hallucination(src, map);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].confidence == Confidence::Heuristic);
}

TEST_CASE("an empty register table cannot support the hallucination check") {
    RegisterMap map = test_map();
    map.registers.clear();
    map.scales.clear();
    SourceFile src = source_of("writeRegister(0x10, 1);\n");
    try {
        check_register_hallucination(src, map);
        FAIL("expected InvalidArgument");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidArgument);
    }
}

TEST_CASE("the configured mode's conversion constant satisfies the scale check") {
    RegisterMap map = test_map();
    SourceFile src = source_of("float g = raw * 0.000061;\n");
    CHECK(check_scale_constant(src, map, "2g").empty());
    SourceFile close_enough = source_of("float g = raw * 0.0000615;\n");
    CHECK(check_scale_constant(close_enough, map, "2g").empty());
}

TEST_CASE("a different mode's constant is a heuristic scale mismatch") {
    RegisterMap map = test_map();
    SourceFile src = source_of(
        "void loop() {\n"
        "  float g = raw * 0.000122;\n"
        "}\n");
    auto findings = check_scale_constant(src, map, "2g");
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].kind == FindingKind::ScaleMismatch);
    CHECK(findings[0].confidence == Confidence::Heuristic);
    CHECK(findings[0].found_real == doctest::Approx(0.000122));
    CHECK(findings[0].expected_real == doctest::Approx(0.000061));
    CHECK(findings[0].line == 2);
}

TEST_CASE("absence of any known constant is not a scale finding") {
    RegisterMap map = test_map();
    SourceFile src = source_of("float g = raw / 16384.0;\n");
    CHECK(check_scale_constant(src, map, "2g").empty());
}

TEST_CASE("an unknown scale mode is rejected") {
    RegisterMap map = test_map();
    SourceFile src = source_of("float g = raw * 0.000061;\n");
    try {
        check_scale_constant(src, map, "64g");
        FAIL("expected UnknownMode");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnknownMode);
    }
}

TEST_CASE("two driver stacks in one sketch are mixed libraries") {
    SourceFile src = source_of(
        "#include <Adafruit_AXM240.h>\n"
        "#include <Wire.h>\n"
        "Adafruit_AXM240 axm;\n"
        "void setup() { Wire.begin(); axm.begin(); }\n");
    auto findings = check_mixed_libraries(src, test_sets());
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].kind == FindingKind::MixedLibraries);
    CHECK(findings[0].confidence == Confidence::Exact);
    REQUIRE(findings[0].names.size() == 2);
    CHECK(findings[0].names[0] == "adafruit_axm");
    CHECK(findings[0].names[1] == "raw_wire");
    CHECK(findings[0].line == 2);
}

TEST_CASE("a single driver stack is fine") {
    SourceFile src = source_of(
        "#include <Adafruit_AXM240.h>\n"
        "Adafruit_AXM240 axm;\n");
    CHECK(check_mixed_libraries(src, test_sets()).empty());
}

TEST_CASE("a stack referenced only in comments downgrades the confidence") {
    SourceFile src = source_of(
        "#include <Adafruit_AXM240.h>\n"
        "// tried Wire.begin() directly first, no luck\n"
        "Adafruit_AXM240 axm;\n");
    auto findings = check_mixed_libraries(src, test_sets());
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].confidence == Confidence::Heuristic);
}

TEST_CASE("library sets load from JSON") {
    testsupport::TempDir dir;
    testsupport::write_file(dir / "sets.json", R"({
        "sets": {
            "alpha": ["Alpha.h"],
            "beta": ["Beta.h", "BetaDriver"]
        }
    })");
    LibrarySets sets = LibrarySets::load(dir / "sets.json");
    REQUIRE(sets.sets.size() == 2);
    CHECK(sets.sets.at("beta").size() == 2);

    testsupport::write_file(dir / "bad.json", "[]");
    CHECK_THROWS_AS(LibrarySets::load(dir / "bad.json"), Error);
    CHECK_THROWS_AS(LibrarySets::load(dir / "missing.json"), Error);
}

TEST_CASE("run_all_checks aggregates every configured family") {
    RegisterMap map = test_map();
    SourceFile src = source_of(
        "#include <Adafruit_AXM240.h>\n"
        "#include <Wire.h>\n"
        "void setup() {\n"
        "  Wire.begin();\n"
        "  Wire.beginTransmission(0x49);\n"
        "  writeRegister(0x7F, 1);\n"
        "}\n"
        "void loop() { float g = raw * 0.000122; }\n");
    auto findings = run_all_checks(src, map, std::string("SDO_GND"), std::string("2g"),
                                   test_sets());
    REQUIRE(findings.size() == 4);
    std::vector<int> counts(4, 0);
    for (const Finding& f : findings) counts[static_cast<int>(f.kind)]++;
    CHECK(counts[static_cast<int>(FindingKind::WrongI2CAddress)] == 1);
    CHECK(counts[static_cast<int>(FindingKind::HallucinatedRegister)] == 1);
    CHECK(counts[static_cast<int>(FindingKind::ScaleMismatch)] == 1);
    CHECK(counts[static_cast<int>(FindingKind::MixedLibraries)] == 1);
}

TEST_CASE("run_all_checks skips families without configuration") {
    RegisterMap map = test_map();
    SourceFile src = source_of("Wire.beginTransmission(0x49);\nfloat g = raw * 0.000122;\n");
    auto findings = run_all_checks(src, map, std::nullopt, std::nullopt, std::nullopt);
    CHECK(findings.empty());
}

TEST_CASE("finding kinds and descriptions are stable") {
    for (FindingKind kind : {FindingKind::WrongI2CAddress, FindingKind::HallucinatedRegister,
                             FindingKind::ScaleMismatch, FindingKind::MixedLibraries}) {
        CHECK(finding_kind_from(finding_kind_name(kind)) == kind);
    }
    CHECK_THROWS_AS(finding_kind_from("Nonsense"), Error);

    Finding f;
    f.kind = FindingKind::WrongI2CAddress;
    f.line = 12;
    f.found = 0x49;
    f.expected = 0x48;
    std::string text = f.describe();
    CHECK(text.find("WrongI2CAddress") != std::string::npos);
    CHECK(text.find("0x49") != std::string::npos);
    CHECK(text.find("0x48") != std::string::npos);
    CHECK(text.find("[Exact]") != std::string::npos);
    f.confidence = Confidence::Heuristic;
    CHECK(f.describe().find("[Heuristic]") != std::string::npos);
}
