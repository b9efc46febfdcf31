#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace specops {

/// 64-bit FNV-1a. Stable across platforms and runs; used for frame/file
/// content fingerprints and transcript digests, not for security.
constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

inline std::string content_digest(std::string_view data) { return to_hex(fnv1a64(data)); }

} // namespace specops
