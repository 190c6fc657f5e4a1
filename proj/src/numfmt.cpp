#include "hilbench/detail/numfmt.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <system_error>

namespace hilbench::detail {

std::string format_double(double value) {
    char buf[512];
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int decimals) {
    char buf[512];
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, decimals);
    return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return text.substr(b, e - b);
}

std::optional<double> parse_strict_double(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::size_t i = 0;
    if (text[i] == '+' || text[i] == '-') ++i;
    std::size_t int_digits = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        ++i;
        ++int_digits;
    }
    if (int_digits == 0) return std::nullopt;
    if (i < text.size() && text[i] == '.') {
        ++i;
        std::size_t frac_digits = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            ++i;
            ++frac_digits;
        }
        if (frac_digits == 0) return std::nullopt;
    }
    if (i != text.size()) return std::nullopt;

    // from_chars does not accept a leading '+'
    std::string_view body = text;
    if (body[0] == '+') body.remove_prefix(1);
    double value = 0.0;
    auto res = std::from_chars(body.data(), body.data() + body.size(), value,
                               std::chars_format::fixed);
    if (res.ec != std::errc() || res.ptr != body.data() + body.size()) return std::nullopt;
    return value;
}

}  // namespace hilbench::detail
