#pragma once

#include <map>
#include <vector>

#include "fraglab/basis.hpp"
#include "fraglab/bigcomb.hpp"
#include "fraglab/distribution.hpp"
#include "fraglab/fit.hpp"
#include "fraglab/fragments.hpp"

namespace fraglab {

// lam[j][n] counts the arrangements of j cluster blocks on n matter sites
// with the left end pinned to the chain edge: each block is an inflatable
// unit of minimal extent 3 (charged, odd span) or 4 (neutral, even span)
// plus an even-length vacuum slot. f[n] sums over all block counts j.
struct LamTables {
    int n_sites = 0;
    std::vector<std::vector<BigInt>> lam;
    std::vector<BigInt> f;
};

LamTables build_lam_tables(int n_sites, int j_max);

// float64 mirror of the same recursion for the large-N scaling sweeps, where
// only ratios matter and exactness is traded for speed
struct LamTablesF {
    int n_sites = 0;
    std::vector<std::vector<double>> lam;
    std::vector<double> f;
};

LamTablesF build_lam_tables_f(int n_sites, int j_max);

// Exact center counts of the k-th cluster, keyed by doubled position: the
// left sub-chain carries exactly k-1 complete blocks, the k-th block spans
// the position, and the right side is free (global) or constrained to the
// remaining block count (sector). The k-th block's rightmost-cluster case is
// the n_right = 0 term of the right-side table, so no separate correction
// term appears.
std::map<int, BigInt> analytic_qk_counts(int n_a, int k, const LamTables& t);
std::map<int, BigInt> analytic_qk_sector_counts(int n_a, int n_c, int k, const LamTables& t);

// Pointwise exact rationals over the full-basis measure; x2 is a doubled
// position. k beyond the possible cluster count gives 0/D.
BigRational analytic_q1(int n_a, int x2);
BigRational analytic_qk(int n_a, int k, int x2);

// All k at once; sector = 0 means the whole blockaded basis, otherwise the
// fixed-cluster-count sector (denominator = sector dimension).
std::vector<ExactDistribution> analytic_distributions(int n_a, int sector = 0);

// Uniform average over the enumerated basis (or sector); exact counts.
std::vector<ExactDistribution> brute_force_distributions(int n_a, int sector = 0);

// counts indexed by doubled position 0..2S; right_table chooses the
// right-side weighting (t.f for global, t.lam[j] for a sector, or a caller
// modified copy).
std::vector<double> qk_counts_f(const LamTablesF& t, int k,
                                const std::vector<double>& right_table);

struct SublatticeFit {
    int parity = 0;  // doubled-position parity: 0 charged, 1 neutral
    int n_points = 0;
    double amplitude = 0.0;
    double center = 0.0;
    double sigma0 = 0.0;
    double fwhm = 0.0;
    double weight = 0.0;  // total weight carried by this sublattice
    double residual = 0.0;
    bool fitted = false;  // false when the discrete fallback was used
};

struct WidthFit {
    double fwhm = 0.0;  // weight-combined across sublattices
    double residual = 0.0;
    bool degenerate = false;  // delta-like input, width forced to 0
    std::vector<SublatticeFit> sublattices;
};

// Gaussian fit per sublattice (the combined curve is jagged); sublattices
// with fewer than 4 support points fall back to the interpolated
// half-maximum crossing width. Positions are in site units (doubled/2).
WidthFit fwhm(const SliomDistribution& dist);

enum class ScalingWhich { Bulk, Boundary, Center };

struct ScalingResult {
    ScalingWhich which = ScalingWhich::Boundary;
    std::vector<double> n_values;
    std::vector<double> sigma_over_n;
    double alpha = 0.0;
    double alpha_stderr = 0.0;
};

// sigma/N vs N on a log-log fit. Boundary: q1 over the full basis. Bulk:
// q_k for k >= 2 with each state's rightmost cluster excluded (the right
// side must hold at least one more block), FWHMs weighted by total weight.
// Center: the middle cluster of the largest sector.
ScalingResult scaling_exponent(const std::vector<int>& n_list, ScalingWhich which);

struct CollapseCurve {
    int n_a = 0;
    std::vector<double> u;  // (x - center_site) / sqrt(N_a)
    std::vector<double> h;  // weight * sqrt(N_a)
};

struct CollapseResult {
    std::vector<CollapseCurve> even;  // charged sublattice
    std::vector<CollapseCurve> odd;   // neutral sublattice
    double max_sup_even = 0.0;        // max pairwise sup distance
    double max_sup_odd = 0.0;
};

// Center-cluster distributions of the largest sector rescaled by sqrt(N_a)
// about the chain center, with the collapse-quality metric per sublattice.
CollapseResult scaling_collapse(const std::vector<int>& n_list);
double collapse_sup_distance(const CollapseCurve& a, const CollapseCurve& b);

struct PeakRatioResult {
    double ratio = 0.0;      // charged-sublattice peak / neutral-sublattice peak
    int sector = 0;          // largest sector used
    int k_center = 0;
    double dim_ratio = 0.0;  // D_total(n_a + 1) / D_total(n_a)
};

PeakRatioResult peak_ratio(int n_a);

}  // namespace fraglab
