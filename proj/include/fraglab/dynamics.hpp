#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "fraglab/basis.hpp"
#include "fraglab/distribution.hpp"
#include "fraglab/evolve.hpp"
#include "fraglab/fragments.hpp"
#include "fraglab/lgtmap.hpp"

namespace fraglab {

// Uniform evolution-time grid in us, inclusive of both ends.
struct Window {
    double t_start = 0.0;
    double t_end = 0.0;
    int n_steps = 0;

    std::vector<double> times() const;
    // Omega*t from 0.56 to 5.60 in 19 steps, the measurement window used for
    // every temporal-ensemble average
    static Window default_for(double omega);
};

// <Z_i(t)> * z_i(0) for each physical atom (Z = 2Q - 1). Rows are atoms
// 1..n_atoms, columns are the entries of `states`.
std::vector<std::vector<double>> z_autocorrelator(const std::vector<StateVector>& states,
                                                  const std::vector<BitConfig>& basis_states,
                                                  const ChainSpec& spec, BitConfig initial);

// Time-averaged |<e_k|psi(t)>|^2 over the sampled grid, uniform weights by
// default; trapezoid halves the two endpoint weights.
std::vector<double> microstate_projections(const std::vector<StateVector>& states,
                                           bool trapezoid = false);

// <Q_i>(t) for physical atoms; rows atoms 1..n_atoms, columns times.
std::vector<std::vector<double>> site_populations(const std::vector<StateVector>& states,
                                                  const std::vector<BitConfig>& basis_states,
                                                  const ChainSpec& spec);

// Asymmetric readout bit-flip channel.
struct SpamModel {
    double p_g_error = 0.01;  // g reads out as r
    double p_r_error = 0.05;  // r reads out as g
};

struct Snapshot {
    int time_index = 0;
    double t = 0.0;
    int shot = 0;
    BitConfig bits = 0;         // g-padding restored; spam never touches it
    std::uint64_t rng_key = 0;  // stream key that produced this time block
};

// Z-basis measurement of each sampled state: CDF inversion of the microstate
// probabilities, then the readout channel on physical atoms. Deterministic
// per (seed, stream_tag, time index), so shots parallelize over times
// without changing output. Pass spam = nullptr for ideal readout.
std::vector<Snapshot> sample_snapshots(const std::vector<StateVector>& states,
                                       const std::vector<double>& times,
                                       const std::vector<BitConfig>& basis_states,
                                       const ChainSpec& spec, int shots_per_time,
                                       const SpamModel* spam, std::uint64_t seed,
                                       std::uint64_t stream_tag = 0);

struct PostselectStats {
    std::size_t input = 0;
    std::size_t kept = 0;
    std::size_t dropped_blockade = 0;
    std::size_t dropped_nc = 0;

    double survival() const { return input == 0 ? 1.0 : double(kept) / double(input); }
};

// require_nc <= 0 disables the cluster-count filter.
std::vector<Snapshot> postselect(const std::vector<Snapshot>& snaps, const ChainSpec& spec,
                                 bool require_blockade, int require_nc,
                                 PostselectStats* stats = nullptr);

// Snapshot collections binned by sector fragment, with the fragment
// dimensions as weights. Bins for fragments that were never prepared are
// filled by inversion: every snapshot of a prepared fragment is reversed and
// credited to the mirror-image pattern's bin (skipped when the pattern is
// its own mirror, where the direct data already covers the bin).
struct TemporalEnsemble {
    int sector = 0;
    Window window;
    std::vector<SliomPattern> patterns;              // one per sector fragment bin
    std::vector<double> weights;                     // fragment dimensions
    std::vector<std::vector<BitConfig>> snapshots;   // accepted bitstrings per bin
};

struct EnsembleOptions {
    Window window;  // n_steps == 0 -> Window::default_for(omega) chosen by the caller
    int shots_per_time = 200;
    bool spam_on = false;
    SpamModel spam;
    bool require_nc = false;  // sector filter during binning
    std::uint64_t seed = 1;
    EvolveMethod method = EvolveMethod::Auto;
    double tolerance = 1e-10;
};

// Runs the quench-and-measure protocol from each initial ordinal under `h`,
// bins accepted snapshots by SLIOM pattern within `sector`, and mirrors data
// into unprepared bins. Snapshots violating the blockade are always dropped
// here (cluster decomposition needs a valid string); `require_nc` adds the
// cluster-count filter. Snapshots whose decoded pattern does not match the
// bin are dropped as leakage.
TemporalEnsemble assemble_sector_ensemble(const BlockadedBasis& basis,
                                          const FragmentTable& table, int sector,
                                          const SparseOperator& h,
                                          const std::vector<std::size_t>& initial_ordinals,
                                          const EnsembleOptions& opts);

struct EnsembleDistribution {
    std::vector<SliomDistribution> per_k;  // k = 1..sector
    std::vector<double> coverage;          // distinct states / dimension, per bin
    double min_coverage = 0.0;
};

// Dimension-weighted uniform average over the distinct states observed in
// each bin. The ensemble is a sampler of fragment membership: occurrence
// frequencies carry diagonal-ensemble bias, so they are discarded and each
// distinct state counts once. Throws ConfigError listing the absent patterns
// when any bin is empty.
EnsembleDistribution ensemble_distribution(const TemporalEnsemble& ensemble,
                                           const ChainSpec& spec);

}  // namespace fraglab
