#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fraglab/types.hpp"

namespace fraglab {

bool is_blockaded(BitConfig c, const ChainSpec& spec);
bool has_g_padding(BitConfig c, const ChainSpec& spec);

// gg + raw + gg. Throws on symbols outside {g, r} or empty input.
BitConfig pad(const std::string& raw_physical, ChainSpec* out_spec = nullptr);

// The nearest-neighbor-blockaded space of a padded chain. States are stored
// in ascending integer order, which the bit packing makes lexicographic with
// g < r; ordinals are therefore reproducible across runs.
class BlockadedBasis {
  public:
    // Enumerates by backtracking over the constraint (never by filtering
    // 2^N strings). Throws CapacityError when F_{N_a+2} exceeds the budget.
    explicit BlockadedBasis(ChainSpec spec, std::size_t state_budget = 50'000'000);

    const ChainSpec& spec() const { return spec_; }
    std::size_t size() const { return states_.size(); }
    BitConfig state(std::size_t k) const { return states_[k]; }
    const std::vector<BitConfig>& states() const { return states_; }

    // Inverse map; throws ConfigError if the config is not a member
    // (blockade violation, missing padding, or out of range).
    std::size_t index_of(BitConfig c) const;
    bool contains(BitConfig c) const;

  private:
    ChainSpec spec_;
    std::vector<BitConfig> states_;
};

// The unconstrained 2^{N_a} space (padding fixed to g). Needed only for
// small-chain validation where blockade emergence itself is the question.
// States are implicit: ordinal k <-> physical bits k, so index 0 is all-g.
class FullSpace {
  public:
    explicit FullSpace(ChainSpec spec) : spec_(spec) {
        if (spec_.n_atoms > 16)
            throw CapacityError("FullSpace: n_atoms > 16 (2^N state vectors would not fit)");
    }

    const ChainSpec& spec() const { return spec_; }
    std::size_t size() const { return std::size_t{1} << spec_.n_atoms; }

    BitConfig state(std::size_t k) const {
        // physical atoms occupy bits 2 .. n_padded-3; the two low and two
        // high bits are the g padding
        return static_cast<BitConfig>(k) << 2;
    }

    std::size_t index_of(BitConfig c) const {
        if (!has_g_padding(c, spec_)) throw ConfigError("FullSpace: padding bits not g");
        return static_cast<std::size_t>(c >> 2);
    }

  private:
    ChainSpec spec_;
};

// Exact Fibonacci count F_{N_a+2} with F_1 = F_2 = 1; the blockaded basis
// size for a chain of N_a physical atoms.
std::uint64_t blockaded_count(int n_atoms);

}  // namespace fraglab
