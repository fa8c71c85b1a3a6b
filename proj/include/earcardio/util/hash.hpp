#pragma once

#include <cstdint>
#include <string>

namespace earcardio {

// FNV-1a, used for config/manifest provenance stamps.
inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::string fnv1a64_hex(const std::string& s) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(s)));
    return std::string(buf);
}

} // namespace earcardio
