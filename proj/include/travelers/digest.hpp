#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "travelers/types.hpp"

namespace travelers {

/// SHA-256 of a length-prefixed tuple encoding. Every field is framed as
/// a little-endian u32 byte count followed by the raw bytes; integers are
/// encoded as little-endian u64. The frame makes the encoding prefix-free
/// so independent implementations agree bit for bit.
class TupleHasher {
public:
    explicit TupleHasher(std::string_view tag);
    TupleHasher& add_u64(std::uint64_t v);
    TupleHasher& add_bytes(const std::uint8_t* data, std::size_t len);
    TupleHasher& add_digest(const Digest& d);
    Digest finalize() const;

private:
    std::vector<std::uint8_t> buf_;
};

Digest sha256(const std::uint8_t* data, std::size_t len);

/// Reduces the 256-bit digest modulo n (big-endian fold), n > 0.
std::uint64_t digest_mod(const Digest& d, std::uint64_t n);

/// First eight digest bytes as a little-endian integer (PRNG keying).
inline std::uint64_t digest_low64(const Digest& d) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | d[static_cast<std::size_t>(i)];
    return v;
}

}  // namespace travelers
