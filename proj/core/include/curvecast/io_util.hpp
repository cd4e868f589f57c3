#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

namespace curvecast {

/// Shortest round-trip decimal form of a double; locale-free and identical
/// across runs and thread counts.
inline std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    char buffer[40];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

/// FNV-1a 64-bit hash, hex-encoded; used to fingerprint configs in output
/// headers.
inline std::string fnv1a_hex(const std::string& text) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    char buffer[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buffer[i] = digits[hash & 0xF];
        hash >>= 4;
    }
    buffer[16] = '\0';
    return std::string(buffer, 16);
}

}  // namespace curvecast
