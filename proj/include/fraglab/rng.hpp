#pragma once

#include <cstdint>
#include <cmath>
#include <initializer_list>

namespace fraglab {

// splitmix64 step; used both as a generator and as a key mixer.
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Collapses (seed, fragment, time index, shot, ...) into one stream key, so
// shots can be generated in any order or in parallel without changing output.
inline std::uint64_t mix_key(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t acc = 0x243f6a8885a308d3ull;  // arbitrary nonzero start
    for (std::uint64_t p : parts) {
        acc ^= splitmix64(p);
        acc = splitmix64(acc);
    }
    return acc;
}

// Deterministic uniform/normal stream. Hand-rolled (xorshift-free, pure
// splitmix64 + Box-Muller) so outputs never depend on the standard library's
// unspecified distribution algorithms.
class RngStream {
  public:
    explicit RngStream(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1); 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller; one fresh pair per call, spare unused,
    // to keep the draw count per sample fixed
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPiLocal * u2);
    }

  private:
    static constexpr double kTwoPiLocal = 6.283185307179586476925286766559;
    std::uint64_t state_;
};

}  // namespace fraglab
