#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>

namespace travelers {

/// Named random streams derived from one run seed. Draws are keyed rather
/// than sequential, so adding a consumer never perturbs another stream and
/// any traversal can be replayed bit-exactly in isolation.
enum class Stream : std::uint64_t {
    Delays = 1,
    Offsets = 2,
    Corruption = 3,
    Workload = 4,
    Tactics = 5,
    Censorship = 6,
    Trials = 7,
    Paths = 8,
};

/// Counter-based generator: a SplitMix64-style mix applied to the key
/// chain (root seed, stream, key parts). Stable across platforms; not
/// cryptographic. Protocol-visible randomness (hub assignment) goes
/// through the SHA-256 tuple hash instead.
class KeyedRng {
public:
    explicit KeyedRng(std::uint64_t root_seed) : root_(root_seed) {}

    std::uint64_t root() const { return root_; }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t draw(Stream s, const std::uint64_t* parts, std::size_t count) const {
        std::uint64_t h = mix(root_);
        h = mix(h ^ static_cast<std::uint64_t>(s));
        for (std::size_t i = 0; i < count; ++i) h = mix(h ^ parts[i]);
        return h;
    }

    std::uint64_t draw(Stream s, std::initializer_list<std::uint64_t> key) const {
        return draw(s, key.begin(), key.size());
    }

    /// Uniform in [0, range) by rejection; deterministic retry chain.
    std::uint64_t uniform(Stream s, const std::uint64_t* parts, std::size_t count,
                          std::uint64_t range) const {
        if (range == 0) throw std::invalid_argument("uniform: empty range");
        std::uint64_t rem = (UINT64_MAX % range) + 1;
        if (rem == range) rem = 0;  // 2^64 divisible by range
        std::uint64_t v = draw(s, parts, count);
        while (rem != 0 && v >= static_cast<std::uint64_t>(0) - rem) {
            v = mix(v);  // reject the short top segment
        }
        return v % range;
    }

    std::uint64_t uniform(Stream s, std::initializer_list<std::uint64_t> key,
                          std::uint64_t range) const {
        return uniform(s, key.begin(), key.size(), range);
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_in(Stream s, const std::uint64_t* parts, std::size_t count,
                            std::int64_t lo, std::int64_t hi) const {
        if (lo > hi) throw std::invalid_argument("uniform_in: lo > hi");
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(draw(s, parts, count));  // full range
        return lo + static_cast<std::int64_t>(uniform(s, parts, count, span));
    }

    std::int64_t uniform_in(Stream s, std::initializer_list<std::uint64_t> key,
                            std::int64_t lo, std::int64_t hi) const {
        return uniform_in(s, key.begin(), key.size(), lo, hi);
    }

    /// Uniform double in [0, 1).
    double unit(Stream s, std::initializer_list<std::uint64_t> key) const {
        return static_cast<double>(draw(s, key) >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t root_;
};

}  // namespace travelers
