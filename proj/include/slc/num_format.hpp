#pragma once

// Locale-free numeric formatting. All file outputs go through these so that
// identical inputs produce identical bytes on every platform.

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace slc {

/// Shortest decimal form with at most 15 significant digits ('.' separator,
/// round-trips to the same value at that precision).
inline std::string format_g15(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 15);
    return std::string(buf, res.ptr);
}

/// Fixed-point form with the given number of decimals.
inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{}) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    for (const char* p = res.ptr; p != last; ++p) {
        if (*p != ' ' && *p != '\t' && *p != '\r') {
            throw std::invalid_argument("trailing characters after number: '" +
                                        std::string(text) + "'");
        }
    }
    return value;
}

}  // namespace slc
