#pragma once

#include <cstdint>
#include <vector>

#include "fraglab/basis.hpp"
#include "fraglab/bigcomb.hpp"
#include "fraglab/lgtmap.hpp"
#include "fraglab/sparse.hpp"

namespace fraglab {

// Partition of the blockaded basis into Krylov fragments of the constrained
// gauge dynamics. Fragment ids are ordered by smallest member ordinal.
struct FragmentTable {
    std::vector<std::vector<std::uint32_t>> fragments;  // sorted member ordinals
    std::vector<SliomPattern> pattern_of;               // per fragment id
    std::vector<int> sector_of;                         // cluster count per fragment id
    std::vector<std::uint32_t> fragment_of;             // basis ordinal -> fragment id
};

// Connected components of the off-diagonal graph of h_lgt.
FragmentTable find_fragments(const BlockadedBasis& basis, const SparseOperator& h_lgt);

// Same partition from the constrained-hop rule directly; no matrix is
// materialized, which keeps memory linear in the basis size.
FragmentTable find_fragments(const BlockadedBasis& basis);

// One admissible (N_q, N_0) family of fragments: N_q charged and N_0 neutral
// clusters, with the leftover length stored in `inflated_pairs` through
// N_a + 5 = 3 N_q + 4 N_0 + 2 * inflated_pairs.
struct CensusRow {
    int n_q = 0;
    int n_0 = 0;
    int n_c = 0;
    int inflated_pairs = 0;
    BigInt dim;           // dimension of each fragment in the family
    BigInt multiplicity;  // number of charge patterns realizing it
};

struct SectorCensus {
    int n_a = 0;
    std::vector<CensusRow> rows;
    BigInt n_krylov;
    BigInt d_total;
    BigInt d_max;
    BigInt frozen_count;  // fragments of dimension 1
};

SectorCensus build_census(int n_a);

// C((N_a+N_q+1)/2, (N_a+5-3N_q-4N_0)/2); throws ConfigError when the parity
// or negativity admissibility conditions fail.
BigInt fragment_dim(int n_a, int n_q, int n_0);

BigInt count_krylov(int n_a);
BigInt total_dim(int n_a);  // equals the Fibonacci basis size

struct BigRational {
    BigInt num;
    BigInt den;
    double value() const;
};

BigRational frozen_fraction(int n_a);

// 2^{N_c-1}: valid charge patterns in an N_c-cluster sector (where both
// cluster-kind mixtures are geometrically admissible; the live partition is
// authoritative near the maximum cluster count).
BigInt sector_fragment_count(int n_c);

BigInt sector_dim(int n_a, int n_c);

struct LargestSector {
    int exact = 0;     // argmax of sector_dim
    int estimate = 0;  // (n_a + 3) / 6
    BigInt dim;
};

LargestSector largest_sector(int n_a);

}  // namespace fraglab
