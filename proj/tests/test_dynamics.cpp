#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fraglab/basis.hpp"
#include "fraglab/distribution.hpp"
#include "fraglab/dynamics.hpp"
#include "fraglab/evolve.hpp"
#include "fraglab/fragments.hpp"
#include "fraglab/hamiltonians.hpp"
#include "fraglab/lgtmap.hpp"
#include "fraglab/sliomstats.hpp"

using namespace fraglab;

namespace {

// 16-atom crystals and fragment representatives used throughout
const char* kCrystal5 = "rggggrggggrggggr";  // five charged clusters
const char* kCrystal3 = "rggrggrggrggrggr";  // seven singleton clusters, frozen
const char* kStepInit = "grggggrgggrggggr";  // 45-dim five-cluster fragment
const char* kStepPeer = "grgggrggggrggggr";  // its neighbor in projection plots

struct Chain16 {
    ChainSpec spec;
    BlockadedBasis basis;
    RydbergParams params;
    SparseOperator h_gauge;
    DensePropagator prop;
    FragmentTable table;
    std::vector<double> times;

    Chain16()
        : spec(16),
          basis(spec),
          params(RydbergParams::defaults()),
          h_gauge(build_h_lgt(basis, params.omega / 2.0)),
          prop(h_gauge),
          table(find_fragments(basis)),
          times(Window::default_for(params.omega).times()) {}
};

const Chain16& chain16() {
    static Chain16 c;
    return c;
}

std::vector<StateVector> dense_path(const DensePropagator& prop, const StateVector& psi0,
                                    const std::vector<double>& ts) {
    std::vector<StateVector> out;
    out.reserve(ts.size());
    for (double t : ts) out.push_back(prop.at(psi0, t));
    return out;
}

double max_abs_diff(const StateVector& a, const StateVector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double norm2(const StateVector& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s;
}

double energy(const SparseOperator& h, const StateVector& psi) {
    StateVector hpsi(psi.size());
    h.apply(psi, hpsi);
    std::complex<double> e = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) e += std::conj(psi[i]) * hpsi[i];
    return e.real();
}

double in_fragment_weight(const StateVector& psi, const std::vector<std::uint32_t>& members) {
    double w = 0.0;
    for (std::uint32_t m : members) w += std::norm(psi[m]);
    return w;
}

// time-averaged projections restricted to a fragment, normalized to sum 1
std::vector<double> normalized_in_fragment(const std::vector<double>& pbar,
                                           const std::vector<std::uint32_t>& members,
                                           double* weight_out) {
    double w = 0.0;
    for (std::uint32_t m : members) w += pbar[m];
    std::vector<double> v(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) v[i] = pbar[members[i]] / w;
    if (weight_out) *weight_out = w;
    return v;
}

SliomPattern mirrored(SliomPattern p) {
    auto nz = std::find(p.begin(), p.end(), std::int8_t{0});
    std::reverse(p.begin(), nz);
    return p;
}

}  // namespace

TEST_CASE("default measurement window") {
    const RydbergParams p = RydbergParams::defaults();
    const Window w = Window::default_for(p.omega);
    const auto ts = w.times();
    REQUIRE(ts.size() == 19);
    CHECK(std::abs(ts.front() * p.omega - 0.56) < 1e-12);
    CHECK(std::abs(ts.back() * p.omega - 5.60) < 1e-12);
    const double step = (5.60 - 0.56) / 18.0 / p.omega;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        CHECK(ts[i] > ts[i - 1]);
        CHECK(std::abs(ts[i] - ts[i - 1] - step) < 1e-12);
    }

    const Window single{0.0, 0.0, 1};
    REQUIRE(single.times().size() == 1);
    CHECK(single.times()[0] == 0.0);
}

TEST_CASE("period-3 crystal is a frozen fragment") {
    const Chain16& c = chain16();
    const BitConfig b0 = pad(kCrystal3);
    const std::size_t ord = c.basis.index_of(b0);
    REQUIRE(c.table.fragments[c.table.fragment_of[ord]].size() == 1);

    const StateVector psi0 = unit_state(c.basis.size(), ord);
    const auto states = dense_path(c.prop, psi0, c.times);
    for (const StateVector& psi : states) CHECK(std::abs(1.0 - std::norm(psi[ord])) < 1e-10);

    const auto corr = z_autocorrelator(states, c.basis.states(), c.spec, b0);
    for (const auto& row : corr)
        for (double v : row) CHECK(std::abs(v - 1.0) < 1e-10);
}

TEST_CASE("gauge evolution conserves norm, energy, and fragment weight") {
    const Chain16& c = chain16();
    const std::size_t ord = c.basis.index_of(pad(kCrystal5));
    const auto& members = c.table.fragments[c.table.fragment_of[ord]];
    const StateVector psi0 = unit_state(c.basis.size(), ord);
    const double e0 = energy(c.h_gauge, psi0);

    const auto states = dense_path(c.prop, psi0, c.times);
    for (const StateVector& psi : states) {
        CHECK(std::abs(norm2(psi) - 1.0) < 1e-10);
        CHECK(std::abs(energy(c.h_gauge, psi) - e0) < 1e-9 * (1.0 + std::abs(e0)));
        CHECK(1.0 - in_fragment_weight(psi, members) < 1e-10);
    }
}

TEST_CASE("time reversal and the iterative propagator agree with the dense one") {
    const Chain16& c = chain16();
    const StateVector psi0 = unit_state(c.basis.size(), c.basis.index_of(pad(kCrystal5)));
    const double T = c.times.back();

    const StateVector psi_T = c.prop.at(psi0, T);
    const StateVector back = c.prop.at(psi_T, -T);
    CHECK(max_abs_diff(back, psi0) < 1e-8);

    EvolutionPlan plan;
    plan.hamiltonian = &c.h_gauge;
    plan.initial = psi0;
    plan.times = {T};
    plan.method = EvolveMethod::Iterative;
    plan.tolerance = 1e-10;
    const auto iter = evolve(plan);
    REQUIRE(iter.size() == 1);
    CHECK(max_abs_diff(iter[0], psi_T) < 1e-8);
}

TEST_CASE("period-5 crystal keeps its memory under the gauge dynamics") {
    const Chain16& c = chain16();
    const BitConfig b0 = pad(kCrystal5);
    const StateVector psi0 = unit_state(c.basis.size(), c.basis.index_of(b0));
    const auto states = dense_path(c.prop, psi0, c.times);
    const auto corr = z_autocorrelator(states, c.basis.states(), c.spec, b0);

    double avg = 0.0;
    for (const auto& row : corr)
        for (double v : row) avg += v;
    avg /= static_cast<double>(corr.size() * c.times.size());
    CHECK(avg >= 0.45);
    CHECK(avg == doctest::Approx(0.5427).epsilon(0.01));

    // the initially excited atoms: collapse-and-revival with a nonzero floor
    const int excited[] = {1, 6, 11, 16};
    std::vector<double> trace(c.times.size(), 0.0);
    for (std::size_t tix = 0; tix < c.times.size(); ++tix) {
        for (int a : excited) trace[tix] += corr[static_cast<std::size_t>(a - 1)][tix];
        trace[tix] /= 4.0;
    }
    CHECK(trace.front() == doctest::Approx(0.9957).epsilon(0.01));
    double late5 = 0.0;
    for (std::size_t tix = c.times.size() - 5; tix < c.times.size(); ++tix) late5 += trace[tix];
    late5 /= 5.0;
    CHECK(late5 >= 0.15);
    CHECK(late5 == doctest::Approx(0.2156).epsilon(0.01));
}

TEST_CASE("microscopic chain tracks the gauge model at early times") {
    const Chain16& c = chain16();
    RydbergParams p = c.params;
    p.delta = p.v[1];
    const SparseOperator h_ryd = build_h_ryd(c.basis, p, 2);
    const DensePropagator prop_ryd(h_ryd);

    std::vector<double> early;
    for (double t : c.times)
        if (t * p.omega <= 2.81) early.push_back(t);
    REQUIRE(early.size() == 9);

    const BitConfig b0 = pad(kCrystal5);
    const StateVector psi0 = unit_state(c.basis.size(), c.basis.index_of(b0));
    const auto corr_g =
        z_autocorrelator(dense_path(c.prop, psi0, early), c.basis.states(), c.spec, b0);
    const auto corr_r =
        z_autocorrelator(dense_path(prop_ryd, psi0, early), c.basis.states(), c.spec, b0);

    double dev = 0.0;
    for (std::size_t a = 0; a < corr_g.size(); ++a)
        for (std::size_t tix = 0; tix < early.size(); ++tix)
            dev = std::max(dev, std::abs(corr_r[a][tix] - corr_g[a][tix]));
    CHECK(dev <= 0.08);
    CHECK(dev == doctest::Approx(0.0422).epsilon(0.1));
}

TEST_CASE("facilitated dynamics relaxes the crystal on the full space") {
    const ChainSpec spec(16);
    const FullSpace space(spec);
    const RydbergParams p = RydbergParams::defaults();
    const SparseOperator h = build_h_pxq(space, p.omega);

    const BitConfig b0 = pad(kCrystal5);
    EvolutionPlan plan;
    plan.hamiltonian = &h;
    plan.initial = unit_state(space.size(), space.index_of(b0));
    plan.times = Window::default_for(p.omega).times();
    plan.tolerance = 1e-10;
    const auto states = evolve(plan);
    for (const StateVector& psi : states) CHECK(std::abs(norm2(psi) - 1.0) < 1e-8);

    std::vector<BitConfig> basis_states(space.size());
    for (std::size_t k = 0; k < space.size(); ++k) basis_states[k] = space.state(k);
    const auto corr = z_autocorrelator(states, basis_states, spec, b0);

    double avg = 0.0;
    std::vector<double> site_avg(plan.times.size(), 0.0);
    for (const auto& row : corr)
        for (std::size_t tix = 0; tix < row.size(); ++tix) {
            avg += row[tix];
            site_avg[tix] += row[tix] / static_cast<double>(corr.size());
        }
    avg /= static_cast<double>(corr.size() * plan.times.size());
    CHECK(avg <= 0.25);
    CHECK(avg == doctest::Approx(0.1732).epsilon(0.05));
    for (std::size_t tix = plan.times.size() - 5; tix < plan.times.size(); ++tix)
        CHECK(std::abs(site_avg[tix]) <= 0.10);
}

TEST_CASE("position disorder preserves the fragment support") {
    const Chain16& c = chain16();
    RydbergParams p = c.params;
    p.delta = p.v[1];

    const std::size_t ord = c.basis.index_of(pad(kStepPeer));
    const auto& members = c.table.fragments[c.table.fragment_of[ord]];
    REQUIRE(members.size() == 45);
    const StateVector psi0 = unit_state(c.basis.size(), ord);
    const Window w{7.0 / p.omega, 14.0 / p.omega, 29};
    const auto times = w.times();

    const SparseOperator h_clean = build_h_ryd(c.basis, p, 3);
    const auto pbar_c = microstate_projections(dense_path(DensePropagator(h_clean), psi0, times));
    double weight_c = 0.0;
    const auto vec_c = normalized_in_fragment(pbar_c, members, &weight_c);
    CHECK(weight_c >= 0.70);
    const double spread_c = *std::max_element(vec_c.begin(), vec_c.end()) /
                            *std::min_element(vec_c.begin(), vec_c.end());

    for (std::uint64_t seed : {1ull, 2ull}) {
        const DisorderRealization real = sample_disorder(c.spec, p, 0.083, seed);
        const SparseOperator h_dis = build_h_disordered(c.basis, p, real);
        const auto pbar_d =
            microstate_projections(dense_path(DensePropagator(h_dis), psi0, times));
        double weight_d = 0.0;
        const auto vec_d = normalized_in_fragment(pbar_d, members, &weight_d);
        CHECK(weight_d >= 0.70);

        double tv = 0.0;
        for (std::size_t i = 0; i < vec_c.size(); ++i) tv += std::abs(vec_c[i] - vec_d[i]);
        tv *= 0.5;
        CHECK(tv <= 0.45);

        const double spread_d = *std::max_element(vec_d.begin(), vec_d.end()) /
                                *std::min_element(vec_d.begin(), vec_d.end());
        CHECK(spread_d / spread_c >= 0.5);
        CHECK(spread_d / spread_c <= 2.5);
    }
}

TEST_CASE("snapshot sampler is deterministic and unbiased") {
    const ChainSpec spec(6);
    const BlockadedBasis basis(spec);
    StateVector psi(basis.size(), 0.0);
    const double probs[] = {0.4, 0.3, 0.2, 0.1};
    for (std::size_t i = 0; i < 4; ++i) psi[i] = std::sqrt(probs[i]);

    const std::vector<StateVector> states = {psi, psi};
    const std::vector<double> times = {0.1, 0.2};
    const auto s1 = sample_snapshots(states, times, basis.states(), spec, 10000, nullptr, 7, 0);
    const auto s2 = sample_snapshots(states, times, basis.states(), spec, 10000, nullptr, 7, 0);
    REQUIRE(s1.size() == 20000);
    REQUIRE(s2.size() == 20000);
    bool identical = true;
    for (std::size_t i = 0; i < s1.size(); ++i) identical = identical && s1[i].bits == s2[i].bits;
    CHECK(identical);

    const auto s3 = sample_snapshots(states, times, basis.states(), spec, 10000, nullptr, 7, 1);
    bool differs = false;
    for (std::size_t i = 0; i < s1.size(); ++i) differs = differs || s1[i].bits != s3[i].bits;
    CHECK(differs);

    // metadata: keys shared within a time block, distinct across blocks
    CHECK(s1[0].time_index == 0);
    CHECK(s1[0].t == 0.1);
    CHECK(s1[19999].time_index == 1);
    CHECK(s1[0].rng_key == s1[9999].rng_key);
    CHECK(s1[0].rng_key != s1[10000].rng_key);

    std::map<std::size_t, int> hits;
    for (const Snapshot& s : s1) ++hits[basis.index_of(s.bits)];
    double tv = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const double emp = hits.count(k) ? hits[k] / 20000.0 : 0.0;
        const double exact = k < 4 ? probs[k] : 0.0;
        tv += std::abs(emp - exact);
    }
    CHECK(0.5 * tv < 0.02);
}

TEST_CASE("readout errors flip physical atoms but never the padding") {
    const ChainSpec spec(6);
    const BlockadedBasis basis(spec);
    StateVector psi(basis.size(), 0.0);
    const BitConfig b0 = pad("rggggr");
    psi[basis.index_of(b0)] = 1.0;

    const SpamModel all_g_flip{1.0, 0.0};
    const auto sg = sample_snapshots({psi}, {0.0}, basis.states(), spec, 5, &all_g_flip, 1, 0);
    for (const Snapshot& s : sg) {
        CHECK(config_to_string(s.bits, spec) == "ggrrrrrrgg");
        CHECK(has_g_padding(s.bits, spec));
    }

    const SpamModel all_r_flip{0.0, 1.0};
    const auto sr = sample_snapshots({psi}, {0.0}, basis.states(), spec, 5, &all_r_flip, 1, 0);
    for (const Snapshot& s : sr) CHECK(config_to_string(s.bits, spec) == "gggggggggg");
}

TEST_CASE("postselection drops blockade violations and sector leakage") {
    const ChainSpec spec(6);
    auto mk = [](const std::string& s) {
        Snapshot x;
        x.bits = pad(s);
        return x;
    };
    const std::vector<Snapshot> snaps = {mk("rggrgg"), mk("rrgggg"), mk("rgrgrg")};
    const int nc_a = decompose(snaps[0].bits, spec).n_clusters;
    const int nc_c = decompose(snaps[2].bits, spec).n_clusters;
    REQUIRE(nc_a != nc_c);
    CHECK(!is_blockaded(snaps[1].bits, spec));

    PostselectStats st;
    auto kept = postselect(snaps, spec, true, 0, &st);
    CHECK(kept.size() == 2);
    CHECK(st.dropped_blockade == 1);
    CHECK(st.dropped_nc == 0);
    CHECK(st.survival() == doctest::Approx(2.0 / 3.0));

    kept = postselect(snaps, spec, true, nc_a, &st);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].bits == snaps[0].bits);
    CHECK(st.dropped_blockade == 1);
    CHECK(st.dropped_nc == 1);

    // the cluster filter needs a valid string, so violations drop either way
    kept = postselect(snaps, spec, false, nc_a, &st);
    CHECK(kept.size() == 1);
    CHECK(st.dropped_blockade == 1);

    kept = postselect(snaps, spec, false, 0, &st);
    CHECK(kept.size() == 3);
    CHECK(st.survival() == 1.0);
}

TEST_CASE("time-averaged projections support both quadratures") {
    StateVector a = {1.0, 0.0}, b = {0.0, 1.0};
    const std::vector<StateVector> states = {a, b, a};
    const auto uniform = microstate_projections(states);
    CHECK(uniform[0] == doctest::Approx(2.0 / 3.0));
    CHECK(uniform[1] == doctest::Approx(1.0 / 3.0));
    const auto trap = microstate_projections(states, true);
    CHECK(trap[0] == doctest::Approx(0.5));
    CHECK(trap[1] == doctest::Approx(0.5));
}

TEST_CASE("site populations read single configurations exactly") {
    const ChainSpec spec(6);
    const BlockadedBasis basis(spec);
    StateVector psi(basis.size(), 0.0);
    psi[basis.index_of(pad("rggggr"))] = 1.0;
    const auto pops = site_populations({psi}, basis.states(), spec);
    REQUIRE(pops.size() == 6);
    for (int i = 0; i < 6; ++i)
        CHECK(pops[static_cast<std::size_t>(i)][0] ==
              doctest::Approx(i == 0 || i == 5 ? 1.0 : 0.0));
}

TEST_CASE("sector ensemble reconstructs the exact sector average") {
    const ChainSpec spec(10);
    const BlockadedBasis basis(spec);
    const FragmentTable table = find_fragments(basis);
    const RydbergParams p = RydbergParams::defaults();
    const SparseOperator h = build_h_lgt(basis, p.omega / 2.0);
    const int sector = 3;

    // one representative per mirror pair of patterns, smallest member each
    std::vector<std::size_t> inits;
    std::set<std::string> covered;
    std::vector<double> dims;
    for (std::size_t f = 0; f < table.fragments.size(); ++f) {
        if (table.sector_of[f] != sector) continue;
        dims.push_back(static_cast<double>(table.fragments[f].size()));
        const std::string key = pattern_to_string(table.pattern_of[f]);
        if (covered.count(key)) continue;
        covered.insert(key);
        covered.insert(pattern_to_string(mirrored(table.pattern_of[f])));
        inits.push_back(table.fragments[f].front());
    }
    REQUIRE(dims.size() == 4);
    std::sort(dims.begin(), dims.end());
    CHECK(dims == std::vector<double>{15.0, 15.0, 15.0, 35.0});
    REQUIRE(inits.size() == 3);

    EnsembleOptions opts;
    opts.window = Window::default_for(p.omega);
    opts.shots_per_time = 200;
    opts.seed = 3;
    const TemporalEnsemble ens = assemble_sector_ensemble(basis, table, sector, h, inits, opts);
    REQUIRE(ens.patterns.size() == 4);
    for (const auto& bin : ens.snapshots) CHECK(!bin.empty());

    const EnsembleDistribution dist = ensemble_distribution(ens, spec);
    REQUIRE(dist.per_k.size() == 3);
    REQUIRE(dist.coverage.size() == 4);
    CHECK(dist.min_coverage >= 0.9);

    const auto exact = analytic_distributions(10, sector);
    for (int k = 1; k <= sector; ++k) {
        const auto ref = exact[static_cast<std::size_t>(k - 1)].to_weights();
        CHECK(total_variation(dist.per_k[static_cast<std::size_t>(k - 1)], ref) <= 0.1);
    }

    // readout errors plus postselection keep the estimate close
    EnsembleOptions noisy = opts;
    noisy.spam_on = true;
    noisy.require_nc = true;
    const auto ens2 = assemble_sector_ensemble(basis, table, sector, h, inits, noisy);
    const auto dist2 = ensemble_distribution(ens2, spec);
    for (int k = 1; k <= sector; ++k) {
        const auto ref = exact[static_cast<std::size_t>(k - 1)].to_weights();
        CHECK(total_variation(dist2.per_k[static_cast<std::size_t>(k - 1)], ref) <= 0.2);
    }

    // preparing only the palindromic bin leaves the rest empty
    const auto starved = assemble_sector_ensemble(basis, table, sector, h, {inits[0]}, opts);
    CHECK_THROWS_AS(ensemble_distribution(starved, spec), ConfigError);
}
