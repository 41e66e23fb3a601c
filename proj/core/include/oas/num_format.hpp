#pragma once

// Locale-independent numeric formatting shared by every text emitter.
// Fixed at 12 significant digits so repeated runs produce byte-identical
// output that is still precise enough to round-trip comparisons.

#include <charconv>
#include <cstdint>
#include <string>

namespace oas {

inline std::string format_number(double value) {
    char buf[48];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

inline std::string format_number(std::int64_t value) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

} // namespace oas
