#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace newspulse {

// Streaming SHA-256 (FIPS 180-4). Used for article content hashes and
// output manifests, so digests must be stable across platforms.
class Sha256 {
public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::array<uint8_t, 32> digest();

    static std::string hex(std::string_view data);

private:
    void process_block(const uint8_t* block);

    uint32_t state_[8];
    uint64_t total_len_;
    uint8_t buffer_[64];
    size_t buffer_len_;
};

std::string to_hex(const std::array<uint8_t, 32>& digest);

} // namespace newspulse
