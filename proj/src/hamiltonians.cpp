#include "fraglab/hamiltonians.hpp"

#include <cmath>
#include <tuple>

#include "fraglab/lgtmap.hpp"
#include "fraglab/rng.hpp"

namespace fraglab {

namespace {

using Triplets = std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>;

int count_r_pairs(BitConfig c, const ChainSpec& spec, int range) {
    int n = 0;
    const int np = spec.n_padded();
    for (int i = 1; i + range <= np; ++i)
        if (atom_is_r(c, i, spec) && atom_is_r(c, i + range, spec)) ++n;
    return n;
}

int popcount_r(BitConfig c) { return __builtin_popcountll(c); }

}  // namespace

SparseOperator build_h_ryd(const BlockadedBasis& basis, const RydbergParams& params,
                           int max_range) {
    if (max_range < 1 || max_range > 3) throw ConfigError("build_h_ryd: max_range must be 1..3");
    const ChainSpec& spec = basis.spec();
    const int np = spec.n_padded();
    Triplets tr;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const BitConfig c = basis.state(k);
        double diag = -params.delta * popcount_r(c);
        for (int range = 2; range <= max_range; ++range)  // range 1 cannot occur here
            diag += params.v[static_cast<std::size_t>(range - 1)] * count_r_pairs(c, spec, range);
        if (diag != 0.0)
            tr.emplace_back(static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k), diag);
        for (int i = 3; i <= np - 2; ++i) {
            const BitConfig f = flip_atom(c, i, spec);
            if (!is_blockaded(f, spec)) continue;  // projected out
            tr.emplace_back(static_cast<std::uint32_t>(basis.index_of(f)),
                            static_cast<std::uint32_t>(k), 0.5 * params.omega);
        }
    }
    SparseOperator op = SparseOperator::from_triplets(basis.size(), std::move(tr));
    op.set_hermitian_flag(true);
    return op;
}

SparseOperator build_h_ryd_full(const FullSpace& space, const RydbergParams& params,
                                int max_range) {
    if (max_range < 1 || max_range > 3)
        throw ConfigError("build_h_ryd_full: max_range must be 1..3");
    const ChainSpec& spec = space.spec();
    const int np = spec.n_padded();
    Triplets tr;
    for (std::size_t k = 0; k < space.size(); ++k) {
        const BitConfig c = space.state(k);
        double diag = -params.delta * popcount_r(c);
        for (int range = 1; range <= max_range; ++range)
            diag += params.v[static_cast<std::size_t>(range - 1)] * count_r_pairs(c, spec, range);
        if (diag != 0.0)
            tr.emplace_back(static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k), diag);
        for (int i = 3; i <= np - 2; ++i) {
            const BitConfig f = flip_atom(c, i, spec);
            tr.emplace_back(static_cast<std::uint32_t>(space.index_of(f)),
                            static_cast<std::uint32_t>(k), 0.5 * params.omega);
        }
    }
    SparseOperator op = SparseOperator::from_triplets(space.size(), std::move(tr));
    op.set_hermitian_flag(true);
    return op;
}

SparseOperator build_h_lgt(const BlockadedBasis& basis, double w) {
    const ChainSpec& spec = basis.spec();
    const int np = spec.n_padded();
    Triplets tr;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const BitConfig c = basis.state(k);
        for (int i = 3; i <= np - 2; ++i) {
            if (atom_is_r(c, i - 1, spec) || atom_is_r(c, i + 1, spec)) continue;
            const bool l = atom_is_r(c, i - 2, spec);
            const bool r = atom_is_r(c, i + 2, spec);
            if (l == r) continue;  // need exactly one next-nearest-neighbor r
            tr.emplace_back(static_cast<std::uint32_t>(basis.index_of(flip_atom(c, i, spec))),
                            static_cast<std::uint32_t>(k), w);
        }
    }
    SparseOperator op = SparseOperator::from_triplets(basis.size(), std::move(tr));
    op.set_hermitian_flag(true);
    return op;
}

SparseOperator build_h_pxq(const FullSpace& space, double omega) {
    const ChainSpec& spec = space.spec();
    const int np = spec.n_padded();
    Triplets tr;
    for (std::size_t k = 0; k < space.size(); ++k) {
        const BitConfig c = space.state(k);
        for (int i = 3; i <= np - 2; ++i) {
            const int r_neighbors = (atom_is_r(c, i - 1, spec) ? 1 : 0) +
                                    (atom_is_r(c, i + 1, spec) ? 1 : 0);
            if (r_neighbors != 1) continue;
            tr.emplace_back(static_cast<std::uint32_t>(space.index_of(flip_atom(c, i, spec))),
                            static_cast<std::uint32_t>(k), 0.5 * omega);
        }
    }
    SparseOperator op = SparseOperator::from_triplets(space.size(), std::move(tr));
    op.set_hermitian_flag(true);
    return op;
}

SparseOperator build_nc_operator(const BlockadedBasis& basis) {
    const ChainSpec& spec = basis.spec();
    const int np = spec.n_padded();
    std::vector<double> diag(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const BitConfig c = basis.state(k);
        int nc = 1;
        for (int i = 1; i <= np - 2; ++i)
            if (atom_is_r(c, i, spec) && !atom_is_r(c, i + 2, spec)) ++nc;
        diag[k] = static_cast<double>(nc);
    }
    return SparseOperator::diagonal(diag);
}

std::vector<LadderOp> build_ladder_ops_full(const FullSpace& space,
                                            const RydbergParams& params) {
    const ChainSpec& spec = space.spec();
    const int np = spec.n_padded();
    std::array<Triplets, 5> tr;  // m = -2..+2 at index m+2
    for (std::size_t k = 0; k < space.size(); ++k) {
        const BitConfig c = space.state(k);
        for (int i = 3; i <= np - 2; ++i) {
            const int r_neighbors = (atom_is_r(c, i - 1, spec) ? 1 : 0) +
                                    (atom_is_r(c, i + 1, spec) ? 1 : 0);
            // flipping g->r creates r_neighbors rr pairs; r->g destroys them
            const int m = atom_is_r(c, i, spec) ? -r_neighbors : r_neighbors;
            tr[static_cast<std::size_t>(m + 2)].emplace_back(
                static_cast<std::uint32_t>(space.index_of(flip_atom(c, i, spec))),
                static_cast<std::uint32_t>(k), 0.5 * params.omega);
        }
    }
    std::vector<LadderOp> out;
    for (int m = -2; m <= 2; ++m) {
        LadderOp lo;
        lo.m = m;
        lo.op = SparseOperator::from_triplets(space.size(),
                                              std::move(tr[static_cast<std::size_t>(m + 2)]));
        out.push_back(std::move(lo));
    }
    return out;
}

std::vector<LadderOp> build_ladder_ops(const BlockadedBasis& basis, const RydbergParams& params,
                                       LadderScale scale) {
    if (scale == LadderScale::V0)
        throw ConfigError("build_ladder_ops: the V0 family needs the full space; "
                          "use build_ladder_ops_full");
    const ChainSpec& spec = basis.spec();
    const int np = spec.n_padded();
    std::array<Triplets, 3> tr;  // m = -1..+1 at index m+1
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const BitConfig c = basis.state(k);
        for (int i = 3; i <= np - 2; ++i) {
            if (atom_is_r(c, i - 1, spec) || atom_is_r(c, i + 1, spec)) continue;
            const int nnn_r = (atom_is_r(c, i - 2, spec) ? 1 : 0) +
                              (atom_is_r(c, i + 2, spec) ? 1 : 0);
            // removing an r between two clusters merges them (cluster count
            // down, m = +1); inserting one amid r-flanked vacuum splits a
            // separator the same way in reverse
            int m = 0;
            if (nnn_r == 0) m = atom_is_r(c, i, spec) ? +1 : -1;
            if (nnn_r == 2) m = atom_is_r(c, i, spec) ? -1 : +1;
            tr[static_cast<std::size_t>(m + 1)].emplace_back(
                static_cast<std::uint32_t>(basis.index_of(flip_atom(c, i, spec))),
                static_cast<std::uint32_t>(k), 0.5 * params.omega);
        }
    }
    std::vector<LadderOp> out;
    for (int m = -1; m <= 1; ++m) {
        LadderOp lo;
        lo.m = m;
        lo.op = SparseOperator::from_triplets(basis.size(),
                                              std::move(tr[static_cast<std::size_t>(m + 1)]));
        out.push_back(std::move(lo));
    }
    return out;
}

SparseOperator build_h0_pairs(const FullSpace& space, double v0) {
    std::vector<double> diag(space.size());
    for (std::size_t k = 0; k < space.size(); ++k)
        diag[k] = v0 * count_r_pairs(space.state(k), space.spec(), 1);
    return SparseOperator::diagonal(diag);
}

SparseOperator build_h1_pairs(const BlockadedBasis& basis, double v1) {
    const ChainSpec& spec = basis.spec();
    const int np = spec.n_padded();
    std::vector<double> diag(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const BitConfig c = basis.state(k);
        int n = 0;
        for (int i = 1; i <= np - 2; ++i)
            if (atom_is_r(c, i, spec) && !atom_is_r(c, i + 2, spec)) ++n;
        diag[k] = -v1 * n;
    }
    return SparseOperator::diagonal(diag);
}

SparseOperator build_h_eff2(const BlockadedBasis& basis, double omega, double v1) {
    const ChainSpec& spec = basis.spec();
    const int np = spec.n_padded();
    const double pref = omega * omega / (4.0 * v1);
    Triplets tr;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const BitConfig c = basis.state(k);
        double diag = 0.0;
        for (int i = 3; i <= np - 2; ++i) {
            if (atom_is_r(c, i - 1, spec) || atom_is_r(c, i + 1, spec)) continue;
            const double pz = atom_is_r(c, i, spec) ? -1.0 : +1.0;
            const bool l = atom_is_r(c, i - 2, spec);
            const bool r = atom_is_r(c, i + 2, spec);
            if (!l && !r)
                diag += pref * pz;
            else if (l && r)
                diag -= pref * pz;
        }
        if (diag != 0.0)
            tr.emplace_back(static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k), diag);
        for (int i = 4; i <= np - 3; ++i) {
            if (atom_is_r(c, i - 2, spec) || atom_is_r(c, i, spec) || atom_is_r(c, i + 2, spec))
                continue;
            if (atom_is_r(c, i - 3, spec) != atom_is_r(c, i + 3, spec)) continue;
            // r hops from i-1 to i+1 or back; two sequential bond-flips
            // through the virtual blockade-violating intermediate
            for (const auto& [src, dst] : {std::pair{i + 1, i - 1}, std::pair{i - 1, i + 1}}) {
                if (!atom_is_r(c, src, spec) || atom_is_r(c, dst, spec)) continue;
                const BitConfig f = flip_atom(flip_atom(c, src, spec), dst, spec);
                tr.emplace_back(static_cast<std::uint32_t>(basis.index_of(f)),
                                static_cast<std::uint32_t>(k), -pref);
            }
        }
    }
    SparseOperator op = SparseOperator::from_triplets(basis.size(), std::move(tr));
    op.set_hermitian_flag(true);
    return op;
}

DisorderRealization sample_disorder(const ChainSpec& spec, const RydbergParams& params,
                                    double sigma_r, std::uint64_t seed) {
    if (sigma_r < 0.0) throw ConfigError("sample_disorder: sigma_r must be >= 0");
    const int na = spec.n_atoms;
    DisorderRealization out;
    out.sigma_r = sigma_r;
    out.seed = seed;
    out.radial_offset.resize(static_cast<std::size_t>(na));
    out.angle.resize(static_cast<std::size_t>(na));
    RngStream rng(mix_key({seed}));
    for (int i = 0; i < na; ++i) {
        out.radial_offset[static_cast<std::size_t>(i)] = sigma_r * rng.normal();
        out.angle[static_cast<std::size_t>(i)] = kTwoPi * rng.uniform();
    }
    const double a = params.spacing_a;
    for (int range = 1; range <= 3; ++range) {
        auto& vr = out.pair_couplings[static_cast<std::size_t>(range - 1)];
        vr.resize(na > range ? static_cast<std::size_t>(na - range) : 0);
        for (int i = 0; i + range < na; ++i) {
            const int j = i + range;
            const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
            const double dx = static_cast<double>(range) * a +
                              (out.radial_offset[sj] * std::cos(out.angle[sj]) -
                               out.radial_offset[si] * std::cos(out.angle[si]));
            const double dy = out.radial_offset[sj] * std::sin(out.angle[sj]) -
                              out.radial_offset[si] * std::sin(out.angle[si]);
            vr[si] = params.c6 / std::pow(std::hypot(dx, dy), 6.0);
        }
    }
    return out;
}

SparseOperator build_h_disordered(const BlockadedBasis& basis, const RydbergParams& params,
                                  const DisorderRealization& realization) {
    const ChainSpec& spec = basis.spec();
    const int np = spec.n_padded();
    const int na = spec.n_atoms;
    Triplets tr;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const BitConfig c = basis.state(k);
        double diag = -params.v[1] * popcount_r(c);  // detuning pinned to clean v1
        for (int range = 1; range <= 3; ++range) {
            const auto& vr = realization.pair_couplings[static_cast<std::size_t>(range - 1)];
            for (int i = 0; i + range < na; ++i) {
                const int ai = i + 3, aj = i + range + 3;  // padded atom indices
                if (atom_is_r(c, ai, spec) && atom_is_r(c, aj, spec))
                    diag += vr[static_cast<std::size_t>(i)];
            }
        }
        if (diag != 0.0)
            tr.emplace_back(static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k), diag);
        for (int i = 3; i <= np - 2; ++i) {
            const BitConfig f = flip_atom(c, i, spec);
            if (!is_blockaded(f, spec)) continue;
            tr.emplace_back(static_cast<std::uint32_t>(basis.index_of(f)),
                            static_cast<std::uint32_t>(k), 0.5 * params.omega);
        }
    }
    SparseOperator op = SparseOperator::from_triplets(basis.size(), std::move(tr));
    op.set_hermitian_flag(true);
    return op;
}

}  // namespace fraglab
