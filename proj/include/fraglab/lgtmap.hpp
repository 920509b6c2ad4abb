#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraglab/types.hpp"

namespace fraglab {

// A charge cluster: a maximal block of adjacent charged matter sites, coming
// from a block of consecutive g atoms (m atoms -> m-1 sites). Centers are
// kept as doubled integers so the half-integer centers of neutral clusters
// stay exact and hashable.
struct Cluster {
    int k = 0;           // 1-based ordinal from the left
    int left_site = 0;   // matter-site indices, 1-based
    int right_site = 0;
    int site_length = 0;
    int doubled_center = 0;  // left_site + right_site
    bool charged = false;    // odd site_length <=> net charge != 0
    int net_charge = 0;      // -1 | 0 | +1
};

struct VacuumRun {
    int start = 0;   // first matter site of the run
    int length = 0;  // always even between clusters
};

struct ClusterDecomposition {
    std::vector<Cluster> clusters;
    std::vector<VacuumRun> vacuum_runs;
    int n_clusters = 0;
};

// Net-charge labels q_k: +1 if cluster k is charged, -1 if neutral, 0 past
// the last cluster (zeros always form a suffix).
using SliomPattern = std::vector<std::int8_t>;

// Maximum possible cluster count for a chain with this many matter sites.
inline int max_clusters(const ChainSpec& spec) { return (spec.n_sites() + 2) / 3; }

// Splits a padded, blockaded config into charge clusters and vacuum runs.
// Throws ConfigError on blockade or padding violations.
ClusterDecomposition decompose(BitConfig c, const ChainSpec& spec);

// Per-cluster kind labels, padded with zeros to k_max. Requires k_max >= N_c.
SliomPattern sliom_pattern(const ClusterDecomposition& decomp, int k_max);
SliomPattern sliom_pattern_of(BitConfig c, const ChainSpec& spec, int k_max = 0);

// Electric field strings on the bonds (bond b = atom b): +1 right, -1 left.
// Odd bond with a g atom points right; even bonds are reversed.
std::vector<std::int8_t> electric_strings(BitConfig c, const ChainSpec& spec);

// Validates the local divergence constraint at every matter site under the
// staggered-matter convention (negative charges only on odd sites, positive
// only on even sites). True for every blockaded config; rr pairs break it.
bool gauss_check(BitConfig c, const ChainSpec& spec);

std::string pattern_to_string(const SliomPattern& p);

}  // namespace fraglab
