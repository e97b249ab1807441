#pragma once

#include <cstdint>
#include <string_view>

namespace sumset {

// Counter-based random streams.
//
// Stream contract: the i-th output of the stream seeded with s is
//   mix(s + (i+1) * GAMMA)
// where mix is the splitmix64 finalizer.  The i-th value is a pure
// function of (s, i), so a sequence can be extended without resampling
// its prefix, and workers can evaluate any index without coordination.
//
// All experiment randomness is derived from one master seed via
// derive_seed(master, tag, index); no ambient entropy is ever used.

namespace detail {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}
}  // namespace detail

class Stream {
  public:
    explicit Stream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t i) const {
        return detail::mix64(seed_ + (i + 1) * detail::kGamma);
    }

    // Uniform double in [0,1) with 53 random bits.
    double unit(std::uint64_t i) const {
        return static_cast<double>(bits(i) >> 11) * 0x1.0p-53;
    }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
};

// Deterministic sub-seed derivation: (master, purpose tag, index).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index) {
    const std::uint64_t h = detail::mix64(master ^ detail::fnv1a(tag));
    return detail::mix64(h + (index + 1) * detail::kGamma);
}

}  // namespace sumset
