#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

namespace recon {

// FNV-1a 64-bit; used for deterministic content digests (not cryptographic).
struct Fnv1a64 {
    uint64_t h = 0xcbf29ce484222325ULL;

    void update(const void* data, size_t len) {
        const unsigned char* p = (const unsigned char*)data;
        for (size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    }
    void update(const std::string& s) { update(s.data(), s.size()); }

    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
        return std::string(buf);
    }
};

inline std::string fnv1a64_hex(const void* data, size_t len) {
    Fnv1a64 d;
    d.update(data, len);
    return d.hex();
}

inline std::string fnv1a64_hex(const std::string& s) { return fnv1a64_hex(s.data(), s.size()); }

}  // namespace recon
