#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace hilbench::detail {

// Shortest fixed-notation representation that parses back to the same double.
std::string format_double(double value);

// Fixed decimal places, locale independent ("23.273" style device output).
std::string format_fixed(double value, int decimals);

// Strict decimal: optional sign, digits, optional fractional part. No
// exponent, no hex, no inf/nan, no surrounding junk.
std::optional<double> parse_strict_double(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace hilbench::detail
