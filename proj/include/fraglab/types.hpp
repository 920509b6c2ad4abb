#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fraglab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Configuration problems (bad input, unknown flags, inadmissible parameters).
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Resource guards (basis or matrix would exceed the configured budget).
// The CLI maps this to exit code 3.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative numerics failed to reach the requested tolerance.
// The CLI maps this to exit code 4.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Chain geometry. Two ground-state atoms pad each end of the physical chain,
// so every constraint term reads the same at the boundary as in the bulk.
// Matter sites live between adjacent atoms: n_sites = n_padded - 1.
struct ChainSpec {
    int n_atoms = 0;  // physical atoms N_a

    explicit ChainSpec(int na) : n_atoms(na) {
        if (na < 1) throw ConfigError("ChainSpec: n_atoms must be >= 1");
        if (na > 60) throw CapacityError("ChainSpec: n_atoms > 60 exceeds the 64-bit packing limit");
    }

    int n_padded() const { return n_atoms + 4; }
    int n_sites() const { return n_atoms + 3; }
};

// A padded occupation config packs atom i (1-based from the left) into bit
// (n_padded - i), so the integer order of configs equals lexicographic order
// with g < r. Bit value 1 means the atom is in the Rydberg state r.
using BitConfig = std::uint64_t;

inline bool atom_is_r(BitConfig c, int i, const ChainSpec& spec) {
    return (c >> (spec.n_padded() - i)) & 1ull;
}

inline BitConfig set_atom_r(BitConfig c, int i, const ChainSpec& spec) {
    return c | (1ull << (spec.n_padded() - i));
}

inline BitConfig flip_atom(BitConfig c, int i, const ChainSpec& spec) {
    return c ^ (1ull << (spec.n_padded() - i));
}

std::string config_to_string(BitConfig c, const ChainSpec& spec);

// Parses a padded g/r string (length n_padded). Throws ConfigError on bad
// symbols, wrong length, or missing g-padding.
BitConfig config_from_string(const std::string& s, const ChainSpec& spec);

// Reverses the chain left-to-right. Padding is symmetric, so the result is
// again a valid padded config.
BitConfig invert_config(BitConfig c, const ChainSpec& spec);

}  // namespace fraglab
