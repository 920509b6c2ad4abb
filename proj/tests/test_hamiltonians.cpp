#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fraglab/basis.hpp"
#include "fraglab/fragments.hpp"
#include "fraglab/hamiltonians.hpp"
#include "fraglab/lgtmap.hpp"
#include "fraglab/sparse.hpp"
#include "fraglab/types.hpp"

using namespace fraglab;

namespace {

int count_r(BitConfig c, const ChainSpec& spec) {
    int n = 0;
    for (int i = 1; i <= spec.n_padded(); ++i) n += atom_is_r(c, i, spec) ? 1 : 0;
    return n;
}

int pair_count(BitConfig c, const ChainSpec& spec, int range) {
    int n = 0;
    for (int i = 1; i + range <= spec.n_padded(); ++i)
        n += (atom_is_r(c, i, spec) && atom_is_r(c, i + range, spec)) ? 1 : 0;
    return n;
}

// the constrained-flip rule, written independently of the library builder
bool gauge_flip_allowed(BitConfig c, int i, const ChainSpec& spec) {
    if (atom_is_r(c, i - 1, spec) || atom_is_r(c, i + 1, spec)) return false;
    const bool left_r = i >= 3 && atom_is_r(c, i - 2, spec);
    const bool right_r = i + 2 <= spec.n_padded() && atom_is_r(c, i + 2, spec);
    return left_r != right_r;
}

}  // namespace

TEST_CASE("gauge hamiltonian matches a brute-force rule evaluation") {
    ChainSpec spec(5);
    BlockadedBasis basis(spec);
    const double w = 0.7;
    const SparseOperator h = build_h_lgt(basis, w);
    for (std::size_t a = 0; a < basis.size(); ++a) {
        const BitConfig ca = basis.state(a);
        for (std::size_t b = 0; b < basis.size(); ++b) {
            double expect = 0.0;
            for (int i = 3; i <= spec.n_padded() - 2; ++i) {
                if (basis.state(b) != flip_atom(ca, i, spec)) continue;
                if (gauge_flip_allowed(ca, i, spec)) expect = w;
            }
            CHECK(h.coeff(b, a) == doctest::Approx(expect).epsilon(1e-14));
        }
    }
}

TEST_CASE("facilitated model matches a brute-force rule evaluation") {
    ChainSpec spec(5);
    FullSpace space(spec);
    const double omega = 2.0;
    const SparseOperator h = build_h_pxq(space, omega);
    CHECK(h.dim() == 32);
    for (std::size_t a = 0; a < space.size(); ++a) {
        const BitConfig ca = space.state(a);
        CHECK(h.coeff(a, a) == 0.0);
        for (int i = 3; i <= spec.n_padded() - 2; ++i) {
            const bool left = atom_is_r(ca, i - 1, spec);
            const bool right = atom_is_r(ca, i + 1, spec);
            const std::size_t b = space.index_of(flip_atom(ca, i, spec));
            const double expect = (left != right) ? omega / 2.0 : 0.0;
            CHECK(h.coeff(b, a) == doctest::Approx(expect).epsilon(1e-14));
        }
    }
}

TEST_CASE("two-atom full chain has the textbook matrix elements") {
    ChainSpec spec(2);
    FullSpace space(spec);
    RydbergParams p = RydbergParams::defaults();
    p.delta = 1.3;
    const SparseOperator h = build_h_ryd_full(space, p, 3);
    // ordinals: 0 = gg, 1 = gr, 2 = rg, 3 = rr
    CHECK(h.coeff(0, 0) == doctest::Approx(0.0));
    CHECK(h.coeff(1, 1) == doctest::Approx(-p.delta));
    CHECK(h.coeff(2, 2) == doctest::Approx(-p.delta));
    CHECK(h.coeff(3, 3) == doctest::Approx(-2.0 * p.delta + p.v[0]));
    for (auto [a, b] : {std::pair<int, int>{0, 1}, {0, 2}, {1, 3}, {2, 3}})
        CHECK(h.coeff(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) ==
              doctest::Approx(p.omega / 2.0));
    CHECK(h.coeff(0, 3) == 0.0);
}

TEST_CASE("parameter defaults follow the lattice geometry") {
    const RydbergParams p = RydbergParams::defaults();
    CHECK(p.omega == doctest::Approx(kTwoPi * 1.39).epsilon(1e-14));
    CHECK(p.v[1] == doctest::Approx(kTwoPi * 9.2).epsilon(1e-12));
    CHECK(p.v[0] == doctest::Approx(64.0 * p.v[1]).epsilon(1e-12));
    CHECK(p.v[2] == doctest::Approx(p.v[1] * std::pow(2.0 / 3.0, 6)).epsilon(1e-12));
    // the perturbative prefactor that sets the slow scale
    CHECK(p.omega * p.omega / (4.0 * p.v[1]) == doctest::Approx(0.32988).epsilon(1e-4));
}

TEST_CASE("blockaded chain diagonal bookkeeping") {
    ChainSpec spec(6);
    BlockadedBasis basis(spec);
    RydbergParams p = RydbergParams::defaults();
    p.delta = p.v[1];
    const SparseOperator h = build_h_ryd(basis, p, 3);
    for (std::size_t a = 0; a < basis.size(); ++a) {
        const BitConfig c = basis.state(a);
        const double expect = -p.delta * count_r(c, spec) + p.v[1] * pair_count(c, spec, 2) +
                              p.v[2] * pair_count(c, spec, 3);
        CHECK(h.coeff(a, a) == doctest::Approx(expect).epsilon(1e-13));
    }
    const std::size_t z2 = basis.index_of(pad("rgrgrg"));
    CHECK(h.coeff(z2, z2) ==
          doctest::Approx(-3.0 * p.delta + 2.0 * p.v[1] + 0.0 * p.v[2]).epsilon(1e-13));
}

TEST_CASE("blockaded drive only keeps constraint-preserving flips") {
    ChainSpec spec(8);
    BlockadedBasis basis(spec);
    RydbergParams p = RydbergParams::defaults();
    const SparseOperator h = build_h_ryd(basis, p, 2);
    for (std::size_t a = 0; a < basis.size(); ++a) {
        const BitConfig ca = basis.state(a);
        for (int i = 3; i <= spec.n_padded() - 2; ++i) {
            const BitConfig cb = flip_atom(ca, i, spec);
            if (is_blockaded(cb, spec))
                CHECK(h.coeff(basis.index_of(cb), a) == doctest::Approx(p.omega / 2.0));
        }
    }
}

TEST_CASE("every builder returns a symmetric operator") {
    ChainSpec spec(8);
    BlockadedBasis basis(spec);
    FullSpace space(spec);
    RydbergParams p = RydbergParams::defaults();
    p.delta = p.v[1];
    CHECK(build_h_ryd(basis, p, 3).symmetry_residual() == 0.0);
    CHECK(build_h_ryd_full(space, p, 3).symmetry_residual() == 0.0);
    CHECK(build_h_lgt(basis, p.omega / 2.0).symmetry_residual() == 0.0);
    CHECK(build_h_pxq(space, p.omega).symmetry_residual() == 0.0);
    CHECK(build_h_eff2(basis, p.omega, p.v[1]).symmetry_residual() == 0.0);
    const DisorderRealization real = sample_disorder(spec, p, 0.083, 7);
    CHECK(build_h_disordered(basis, p, real).symmetry_residual() == 0.0);
}

TEST_CASE("cluster-number operator counts clusters and commutes with the gauge dynamics") {
    for (int na : {6, 10, 12}) {
        ChainSpec spec(na);
        BlockadedBasis basis(spec);
        const SparseOperator nc = build_nc_operator(basis);
        for (std::size_t a = 0; a < basis.size(); ++a)
            CHECK(nc.coeff(a, a) ==
                  doctest::Approx(decompose(basis.state(a), spec).n_clusters));
        const SparseOperator h = build_h_lgt(basis, 1.0);
        CHECK(h.commutator(nc).max_abs() == 0.0);
    }
}

TEST_CASE("constrained ladder family tridiagonalizes the drive") {
    ChainSpec spec(10);
    BlockadedBasis basis(spec);
    RydbergParams p = RydbergParams::defaults();
    const std::vector<LadderOp> ops = build_ladder_ops(basis, p, LadderScale::V1);
    REQUIRE(ops.size() == 3);

    // the three members partition the blockade-preserving drive
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> trips;
    for (std::size_t a = 0; a < basis.size(); ++a) {
        const BitConfig ca = basis.state(a);
        for (int i = 3; i <= spec.n_padded() - 2; ++i) {
            const BitConfig cb = flip_atom(ca, i, spec);
            if (is_blockaded(cb, spec))
                trips.emplace_back(static_cast<std::uint32_t>(basis.index_of(cb)),
                                   static_cast<std::uint32_t>(a), p.omega / 2.0);
        }
    }
    const SparseOperator drive = SparseOperator::from_triplets(basis.size(), trips);
    SparseOperator sum = ops[0].op;
    for (std::size_t j = 1; j < ops.size(); ++j) sum = sum.plus(ops[j].op);
    CHECK(sum.max_abs_diff(drive) < 1e-14);

    // m = 0 is the gauge Hamiltonian at w = omega / 2
    const auto m0 = std::find_if(ops.begin(), ops.end(),
                                 [](const LadderOp& o) { return o.m == 0; });
    REQUIRE(m0 != ops.end());
    CHECK(m0->op.max_abs_diff(build_h_lgt(basis, p.omega / 2.0)) < 1e-14);

    // ladder identity against the cluster-count diagonal
    const SparseOperator h1 = build_h1_pairs(basis, p.v[1]);
    for (const LadderOp& op : ops) {
        const SparseOperator comm = h1.commutator(op.op);
        const SparseOperator target = op.op.scaled(op.m * p.v[1]);
        CHECK(comm.max_abs_diff(target) < 1e-10);
    }
    CHECK_THROWS_AS(build_ladder_ops(basis, p, LadderScale::V0), ConfigError);
}

TEST_CASE("full-space ladder family splits by created pair count") {
    ChainSpec spec(8);
    FullSpace space(spec);
    RydbergParams p = RydbergParams::defaults();
    const std::vector<LadderOp> ops = build_ladder_ops_full(space, p);
    REQUIRE(ops.size() == 5);
    const SparseOperator h0 = build_h0_pairs(space, p.v[0]);
    for (const LadderOp& op : ops) {
        const SparseOperator comm = h0.commutator(op.op);
        const SparseOperator target = op.op.scaled(op.m * p.v[0]);
        CHECK(comm.max_abs_diff(target) < 1e-10);
    }
    SparseOperator sum = ops[0].op;
    for (std::size_t j = 1; j < ops.size(); ++j) sum = sum.plus(ops[j].op);
    double offdiag = 0.0;
    for (std::size_t a = 0; a < space.size(); ++a)
        for (int i = 3; i <= spec.n_padded() - 2; ++i)
            offdiag = std::max(
                offdiag, std::abs(sum.coeff(space.index_of(flip_atom(space.state(a), i, spec)),
                                            a) -
                                  p.omega / 2.0));
    CHECK(offdiag < 1e-14);
}

TEST_CASE("effective exchange reproduces the block-diagonal ladder commutator") {
    ChainSpec spec(10);
    BlockadedBasis basis(spec);
    RydbergParams p = RydbergParams::defaults();
    const double pref = p.omega * p.omega / (4.0 * p.v[1]);

    const std::vector<LadderOp> ops = build_ladder_ops(basis, p, LadderScale::V1);
    const auto find_m = [&](int m) {
        return std::find_if(ops.begin(), ops.end(),
                            [m](const LadderOp& o) { return o.m == m; })
            ->op;
    };
    const SparseOperator comm = find_m(+1).commutator(find_m(-1)).scaled(1.0 / p.v[1]);

    const FragmentTable table = find_fragments(basis);
    const SparseOperator eff2 = build_h_eff2(basis, p.omega, p.v[1]);

    // within fragments: commutator = eff2 + pair annihilation at +pref
    std::size_t extra = 0;
    for (std::size_t r = 0; r < comm.dim(); ++r)
        for (std::size_t ptr = comm.row_ptr()[r]; ptr < comm.row_ptr()[r + 1]; ++ptr) {
            const std::size_t c = comm.col()[ptr];
            if (table.fragment_of[r] != table.fragment_of[c]) continue;
            const double want = comm.val()[ptr] - eff2.coeff(r, c);
            if (std::abs(want) < 1e-12) continue;
            ++extra;
            CHECK(want == doctest::Approx(pref).epsilon(1e-12));
            const int dr = count_r(basis.state(r), spec) - count_r(basis.state(c), spec);
            CHECK(std::abs(dr) == 2);  // pair creation or annihilation
        }
    CHECK(extra > 0);
    // and eff2 never leaves a fragment
    for (std::size_t r = 0; r < eff2.dim(); ++r)
        for (std::size_t ptr = eff2.row_ptr()[r]; ptr < eff2.row_ptr()[r + 1]; ++ptr)
            CHECK(table.fragment_of[r] == table.fragment_of[eff2.col()[ptr]]);
}

TEST_CASE("effective exchange matrix elements") {
    ChainSpec spec(7);
    BlockadedBasis basis(spec);
    RydbergParams p = RydbergParams::defaults();
    const double pref = p.omega * p.omega / (4.0 * p.v[1]);
    const SparseOperator eff2 = build_h_eff2(basis, p.omega, p.v[1]);
    // exchange hops an r across the g g g window at padded center 6, where
    // both outer neighbors (padded atoms 3 and 9) agree
    const std::size_t a = basis.index_of(pad("rgrgggr"));
    const std::size_t b = basis.index_of(pad("rgggrgr"));
    CHECK(eff2.coeff(b, a) == doctest::Approx(-pref).epsilon(1e-13));
    CHECK(eff2.coeff(a, b) == doctest::Approx(-pref).epsilon(1e-13));
    // diagonal shifts come in units of pref
    bool saw_diag = false;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const double d = eff2.coeff(k, k);
        if (d == 0.0) continue;
        saw_diag = true;
        CHECK(std::abs(std::remainder(d, pref)) < 1e-12);
    }
    CHECK(saw_diag);
}

TEST_CASE("disorder realization statistics and reproducibility") {
    ChainSpec spec(16);
    const RydbergParams p = RydbergParams::defaults();

    const DisorderRealization r1 = sample_disorder(spec, p, 0.083, 42);
    const DisorderRealization r1b = sample_disorder(spec, p, 0.083, 42);
    CHECK(r1.pair_couplings[1] == r1b.pair_couplings[1]);
    const DisorderRealization r3 = sample_disorder(spec, p, 0.083, 43);
    CHECK(r1.pair_couplings[1] != r3.pair_couplings[1]);
    REQUIRE(r1.radial_offset.size() == 16);
    REQUIRE(r1.pair_couplings[0].size() == 15);
    REQUIRE(r1.pair_couplings[1].size() == 14);
    REQUIRE(r1.pair_couplings[2].size() == 13);

    // fluctuation scale of the next-nearest coupling: 6 v1 sigma_r / (2a)
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (std::uint64_t seed = 1; seed <= 400; ++seed) {
        const DisorderRealization r = sample_disorder(spec, p, 0.083, seed);
        for (double v : r.pair_couplings[1]) {
            sum += v - p.v[1];
            sum2 += (v - p.v[1]) * (v - p.v[1]);
            ++n;
        }
    }
    const double mean = sum / static_cast<double>(n);
    const double sd = std::sqrt(sum2 / static_cast<double>(n) - mean * mean) / kTwoPi;
    const double target = 6.0 * p.v[1] * 0.083 / (2.0 * p.spacing_a) / kTwoPi;
    CHECK(target == doctest::Approx(0.68).epsilon(0.02));
    CHECK(sd == doctest::Approx(target).epsilon(0.08));
    CHECK(std::abs(mean) / kTwoPi < 0.15);
}

TEST_CASE("zero disorder reproduces the clean chain exactly") {
    ChainSpec spec(10);
    BlockadedBasis basis(spec);
    RydbergParams p = RydbergParams::defaults();
    p.delta = p.v[1];
    const DisorderRealization real = sample_disorder(spec, p, 0.0, 5);
    for (std::size_t r = 0; r < 3; ++r)
        for (double v : real.pair_couplings[r]) CHECK(v == p.v[r]);
    const SparseOperator hd = build_h_disordered(basis, p, real);
    const SparseOperator hc = build_h_ryd(basis, p, 3);
    // diagonals accumulate pair terms in a different order, so agreement is
    // to rounding, not bit-for-bit
    CHECK(hd.max_abs_diff(hc) < 1e-12);
}
