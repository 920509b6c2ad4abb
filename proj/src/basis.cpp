#include "fraglab/basis.hpp"

#include <algorithm>

namespace fraglab {

std::string config_to_string(BitConfig c, const ChainSpec& spec) {
    std::string s(spec.n_padded(), 'g');
    for (int i = 1; i <= spec.n_padded(); ++i)
        if (atom_is_r(c, i, spec)) s[i - 1] = 'r';
    return s;
}

BitConfig config_from_string(const std::string& s, const ChainSpec& spec) {
    if (static_cast<int>(s.size()) != spec.n_padded())
        throw ConfigError("config string has length " + std::to_string(s.size()) +
                          ", expected " + std::to_string(spec.n_padded()));
    BitConfig c = 0;
    for (int i = 1; i <= spec.n_padded(); ++i) {
        char ch = s[i - 1];
        if (ch == 'r')
            c = set_atom_r(c, i, spec);
        else if (ch != 'g')
            throw ConfigError(std::string("config symbol '") + ch + "' is not g or r");
    }
    if (!has_g_padding(c, spec)) throw ConfigError("config padding atoms must be g");
    return c;
}

BitConfig invert_config(BitConfig c, const ChainSpec& spec) {
    const int n = spec.n_padded();
    BitConfig out = 0;
    for (int i = 1; i <= n; ++i)
        if (atom_is_r(c, i, spec)) out = set_atom_r(out, n + 1 - i, spec);
    return out;
}

bool has_g_padding(BitConfig c, const ChainSpec& spec) {
    const int n = spec.n_padded();
    return !atom_is_r(c, 1, spec) && !atom_is_r(c, 2, spec) &&
           !atom_is_r(c, n - 1, spec) && !atom_is_r(c, n, spec);
}

bool is_blockaded(BitConfig c, const ChainSpec& spec) {
    if (spec.n_padded() < 64 && c >= (BitConfig{1} << spec.n_padded())) return false;
    // adjacent r pair = two set bits next to each other
    return (c & (c >> 1)) == 0;
}

BitConfig pad(const std::string& raw_physical, ChainSpec* out_spec) {
    if (raw_physical.empty()) throw ConfigError("pad: physical string must be nonempty");
    ChainSpec spec(static_cast<int>(raw_physical.size()));
    BitConfig c = config_from_string("gg" + raw_physical + "gg", spec);
    if (out_spec) *out_spec = spec;
    return c;
}

std::uint64_t blockaded_count(int n_atoms) {
    if (n_atoms < 1 || n_atoms > 88) throw ConfigError("blockaded_count: n_atoms out of range");
    // F_{N_a+2}, F_1 = F_2 = 1
    std::uint64_t a = 1, b = 1;  // F_1, F_2
    for (int i = 3; i <= n_atoms + 2; ++i) {
        std::uint64_t next = a + b;
        a = b;
        b = next;
    }
    return b;
}

BlockadedBasis::BlockadedBasis(ChainSpec spec, std::size_t state_budget) : spec_(spec) {
    const std::uint64_t count = blockaded_count(spec_.n_atoms);
    if (count > state_budget)
        throw CapacityError("BlockadedBasis: " + std::to_string(count) +
                            " states exceed the budget of " + std::to_string(state_budget));
    states_.reserve(static_cast<std::size_t>(count));

    // depth-first over physical atoms, g branch before r branch, so states
    // come out in ascending (lexicographic) order
    const int na = spec_.n_atoms;
    struct Frame {
        int pos;        // physical atom index 0-based
        BitConfig acc;  // physical bits chosen so far (atom j -> bit na-1-j)
        bool prev_r;
    };
    std::vector<Frame> stack;
    stack.push_back({0, 0, false});
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.pos == na) {
            states_.push_back(f.acc << 2);  // insert the g padding
            continue;
        }
        // push r branch first so the g branch is processed first (LIFO)
        if (!f.prev_r)
            stack.push_back({f.pos + 1, f.acc | (BitConfig{1} << (na - 1 - f.pos)), true});
        stack.push_back({f.pos + 1, f.acc, false});
    }
}

std::size_t BlockadedBasis::index_of(BitConfig c) const {
    if (!has_g_padding(c, spec_) || !is_blockaded(c, spec_))
        throw ConfigError("index_of: config is not a padded blockaded state");
    auto it = std::lower_bound(states_.begin(), states_.end(), c);
    if (it == states_.end() || *it != c)
        throw ConfigError("index_of: config not found in basis");
    return static_cast<std::size_t>(it - states_.begin());
}

bool BlockadedBasis::contains(BitConfig c) const {
    if (!has_g_padding(c, spec_) || !is_blockaded(c, spec_)) return false;
    return std::binary_search(states_.begin(), states_.end(), c);
}

}  // namespace fraglab
