#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace sumset {

// Every floating-point field in CSV or JSON-adjacent text output goes
// through this one formatter: "%.17g" round-trips any double exactly and
// prints the same bytes on every run, which is what the reproducibility
// checks compare.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

// FNV-1a over raw bytes, for comparing whole output files by value.
inline std::uint64_t content_hash(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace sumset
