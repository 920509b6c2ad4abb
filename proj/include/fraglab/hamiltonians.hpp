#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fraglab/basis.hpp"
#include "fraglab/sparse.hpp"
#include "fraglab/types.hpp"

namespace fraglab {

// Energies are angular frequencies in rad/us (2*pi*MHz) and time is in us,
// so exp(-i H t) needs no unit conversion.
struct RydbergParams {
    double omega = 0.0;      // Rabi frequency
    double delta = 0.0;      // detuning
    double spacing_a = 0.0;  // lattice spacing, um
    double c6 = 0.0;         // van der Waals coefficient, rad/us * um^6
    std::array<double, 4> v{};  // v[j] = c6 / ((j+1) a)^6

    static RydbergParams defaults() {
        RydbergParams p;
        p.omega = kTwoPi * 1.39;
        p.delta = 0.0;
        p.spacing_a = 3.37;
        const double v1 = kTwoPi * 9.2;
        p.c6 = v1 * std::pow(2.0 * p.spacing_a, 6.0);
        p.recompute_v();
        return p;
    }

    void recompute_v() {
        for (int j = 0; j < 4; ++j)
            v[static_cast<std::size_t>(j)] = c6 / std::pow((j + 1) * spacing_a, 6.0);
    }
};

// Full chain Hamiltonian: -delta * sum Q_i + (omega/2) * sum X_i + van der
// Waals interactions kept up to `max_range` lattice spacings (1..3; range 4
// and longer are orders of magnitude below everything else and are always
// dropped). In blockaded mode, flips that would create an adjacent rr pair
// are projected out and the range-1 term vanishes identically.
SparseOperator build_h_ryd(const BlockadedBasis& basis, const RydbergParams& params,
                           int max_range);
SparseOperator build_h_ryd_full(const FullSpace& space, const RydbergParams& params,
                                int max_range);

// Constrained gauge-theory Hamiltonian: flips atom i when both neighbors are
// g and exactly one next-nearest neighbor is r; matrix element +w. The
// g-padding supplies the boundary projectors.
SparseOperator build_h_lgt(const BlockadedBasis& basis, double w);

// Facilitated model at nearest-neighbor resonance: flips atom i when exactly
// one nearest neighbor is r. Flips always create or destroy an adjacent rr
// pair, so the operator lives on the full space.
SparseOperator build_h_pxq(const FullSpace& space, double omega);

// Diagonal cluster-number operator, N_c = 1 + sum_i Q_i P_{i+2}.
SparseOperator build_nc_operator(const BlockadedBasis& basis);

// One rung of a ladder-operator family: [H_ref, op] = m * scale * op.
struct LadderOp {
    int m = 0;
    SparseOperator op;
};

enum class LadderScale { V0, V1 };

// V0 family (full space): the drive (omega/2) sum X_i split by how many
// nearest-neighbor rr pairs each flip creates (m = -2..+2); their reference
// diagonal is v[0] * (rr pair count). V1 family (blockaded): blockade-
// preserving flips split by the cluster-count change they cause (m = -1..+1);
// reference diagonal -v[1] * sum Q_i P_{i+2}. The m=0 member of the V1
// family is build_h_lgt with w = omega/2.
std::vector<LadderOp> build_ladder_ops(const BlockadedBasis& basis, const RydbergParams& params,
                                       LadderScale scale);
std::vector<LadderOp> build_ladder_ops_full(const FullSpace& space, const RydbergParams& params);

// Reference diagonals for the ladder commutator identities.
SparseOperator build_h0_pairs(const FullSpace& space, double v0);
SparseOperator build_h1_pairs(const BlockadedBasis& basis, double v1);

// Second-order effective Hamiltonian: a diagonal Z-shift plus a constrained
// next-nearest-neighbor exchange, both with prefactor omega^2 / (4 v1). The
// exchange sign is fixed by the ladder commutator [T_{+1}, T_{-1}] / v1,
// whose block-diagonal part this operator reproduces up to a pattern-
// preserving pair-annihilation term (characterized in tests).
SparseOperator build_h_eff2(const BlockadedBasis& basis, double omega, double v1);

// Position disorder: each physical atom is displaced in the lattice plane by
// a radial offset of magnitude ~ N(0, sigma_r^2) at a uniformly random
// angle, and pair couplings are recomputed from the Euclidean distances.
// The transverse and axial components combine in quadrature; the axial
// projection is what makes the coupling fluctuations first order in sigma_r.
struct DisorderRealization {
    double sigma_r = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> radial_offset;  // per physical atom, um (signed)
    std::vector<double> angle;          // per physical atom, radians
    // pair_couplings[r-1][i] couples physical atoms i+1 and i+1+r (1-based), r = 1..3
    std::array<std::vector<double>, 3> pair_couplings;
};

DisorderRealization sample_disorder(const ChainSpec& spec, const RydbergParams& params,
                                    double sigma_r, std::uint64_t seed);

// Chain Hamiltonian with per-pair couplings from a disorder realization and
// the detuning pinned to the clean v[1].
SparseOperator build_h_disordered(const BlockadedBasis& basis, const RydbergParams& params,
                                  const DisorderRealization& realization);

}  // namespace fraglab
