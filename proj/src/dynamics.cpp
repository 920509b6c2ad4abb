#include "fraglab/dynamics.hpp"

#include <algorithm>
#include <memory>
#include <set>

#include "fraglab/rng.hpp"

namespace fraglab {

std::vector<double> Window::times() const {
    if (n_steps < 1) throw ConfigError("Window: n_steps must be >= 1");
    if (t_start < 0.0 || t_end < t_start) throw ConfigError("Window: bad time range");
    std::vector<double> out(static_cast<std::size_t>(n_steps));
    if (n_steps == 1) {
        out[0] = t_start;
        return out;
    }
    const double dt = (t_end - t_start) / (n_steps - 1);
    for (int j = 0; j < n_steps; ++j) out[static_cast<std::size_t>(j)] = t_start + dt * j;
    return out;
}

Window Window::default_for(double omega) {
    if (omega <= 0.0) throw ConfigError("Window::default_for: omega must be positive");
    Window w;
    w.t_start = 0.56 / omega;
    w.t_end = 5.60 / omega;
    w.n_steps = 19;
    return w;
}

std::vector<std::vector<double>> z_autocorrelator(const std::vector<StateVector>& states,
                                                  const std::vector<BitConfig>& basis_states,
                                                  const ChainSpec& spec, BitConfig initial) {
    const int na = spec.n_atoms;
    const std::size_t dim = basis_states.size();
    std::vector<std::vector<double>> out(static_cast<std::size_t>(na),
                                         std::vector<double>(states.size(), 0.0));
    for (std::size_t tix = 0; tix < states.size(); ++tix) {
        const StateVector& psi = states[tix];
        if (psi.size() != dim) throw ConfigError("z_autocorrelator: state size mismatch");
        std::vector<double> zexp(static_cast<std::size_t>(na), 0.0);
        for (std::size_t s = 0; s < dim; ++s) {
            const double p = std::norm(psi[s]);
            if (p == 0.0) continue;
            const BitConfig c = basis_states[s];
            for (int i = 1; i <= na; ++i)
                zexp[static_cast<std::size_t>(i - 1)] +=
                    p * (atom_is_r(c, i + 2, spec) ? 1.0 : -1.0);
        }
        for (int i = 1; i <= na; ++i) {
            const double z0 = atom_is_r(initial, i + 2, spec) ? 1.0 : -1.0;
            out[static_cast<std::size_t>(i - 1)][tix] = zexp[static_cast<std::size_t>(i - 1)] * z0;
        }
    }
    return out;
}

std::vector<double> microstate_projections(const std::vector<StateVector>& states,
                                           bool trapezoid) {
    if (states.empty()) throw ConfigError("microstate_projections: no states");
    const std::size_t dim = states.front().size();
    std::vector<double> pbar(dim, 0.0);
    double wsum = 0.0;
    for (std::size_t tix = 0; tix < states.size(); ++tix) {
        const bool endpoint = (tix == 0 || tix + 1 == states.size());
        const double w = (trapezoid && endpoint && states.size() > 1) ? 0.5 : 1.0;
        wsum += w;
        const StateVector& psi = states[tix];
        if (psi.size() != dim) throw ConfigError("microstate_projections: state size mismatch");
        for (std::size_t s = 0; s < dim; ++s) pbar[s] += w * std::norm(psi[s]);
    }
    for (double& p : pbar) p /= wsum;
    return pbar;
}

std::vector<std::vector<double>> site_populations(const std::vector<StateVector>& states,
                                                  const std::vector<BitConfig>& basis_states,
                                                  const ChainSpec& spec) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(spec.n_atoms),
                                         std::vector<double>(states.size(), 0.0));
    for (std::size_t tix = 0; tix < states.size(); ++tix) {
        const StateVector& psi = states[tix];
        if (psi.size() != basis_states.size())
            throw ConfigError("site_populations: state size does not match basis");
        for (std::size_t s = 0; s < psi.size(); ++s) {
            const double p = std::norm(psi[s]);
            if (p == 0.0) continue;
            for (int i = 1; i <= spec.n_atoms; ++i)
                if (atom_is_r(basis_states[s], i + 2, spec)) out[i - 1][tix] += p;
        }
    }
    return out;
}

namespace {

BitConfig apply_spam(BitConfig c, const ChainSpec& spec, const SpamModel& spam, RngStream& rng) {
    for (int i = 1; i <= spec.n_atoms; ++i) {
        const int atom = i + 2;  // physical atoms only; padding is fictitious
        const double u = rng.uniform();
        if (atom_is_r(c, atom, spec)) {
            if (u < spam.p_r_error) c = flip_atom(c, atom, spec);
        } else {
            if (u < spam.p_g_error) c = flip_atom(c, atom, spec);
        }
    }
    return c;
}

}  // namespace

std::vector<Snapshot> sample_snapshots(const std::vector<StateVector>& states,
                                       const std::vector<double>& times,
                                       const std::vector<BitConfig>& basis_states,
                                       const ChainSpec& spec, int shots_per_time,
                                       const SpamModel* spam, std::uint64_t seed,
                                       std::uint64_t stream_tag) {
    if (states.size() != times.size())
        throw ConfigError("sample_snapshots: states/times length mismatch");
    if (shots_per_time < 1) throw ConfigError("sample_snapshots: shots_per_time must be >= 1");
    std::vector<Snapshot> out;
    out.reserve(states.size() * static_cast<std::size_t>(shots_per_time));
    const std::size_t dim = basis_states.size();
    std::vector<double> cdf(dim);
    for (std::size_t tix = 0; tix < states.size(); ++tix) {
        const StateVector& psi = states[tix];
        if (psi.size() != dim) throw ConfigError("sample_snapshots: state size mismatch");
        double acc = 0.0;
        for (std::size_t s = 0; s < dim; ++s) {
            acc += std::norm(psi[s]);
            cdf[s] = acc;
        }
        const double total = acc;  // 1 up to roundoff; normalize the draw instead
        const std::uint64_t key = mix_key({seed, stream_tag, static_cast<std::uint64_t>(tix)});
        RngStream rng(key);
        for (int shot = 0; shot < shots_per_time; ++shot) {
            const double u = rng.uniform() * total;
            const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
            std::size_t s = static_cast<std::size_t>(it - cdf.begin());
            if (s >= dim) s = dim - 1;
            Snapshot snap;
            snap.time_index = static_cast<int>(tix);
            snap.t = times[tix];
            snap.shot = shot;
            snap.bits = basis_states[s];
            snap.rng_key = key;
            if (spam) snap.bits = apply_spam(snap.bits, spec, *spam, rng);
            out.push_back(snap);
        }
    }
    return out;
}

std::vector<Snapshot> postselect(const std::vector<Snapshot>& snaps, const ChainSpec& spec,
                                 bool require_blockade, int require_nc,
                                 PostselectStats* stats) {
    PostselectStats st;
    st.input = snaps.size();
    std::vector<Snapshot> out;
    out.reserve(snaps.size());
    for (const Snapshot& s : snaps) {
        const bool blockaded = is_blockaded(s.bits, spec);
        if (require_blockade && !blockaded) {
            ++st.dropped_blockade;
            continue;
        }
        if (require_nc > 0) {
            if (!blockaded) {  // cluster count undefined on blockade violations
                ++st.dropped_blockade;
                continue;
            }
            if (decompose(s.bits, spec).n_clusters != require_nc) {
                ++st.dropped_nc;
                continue;
            }
        }
        out.push_back(s);
        ++st.kept;
    }
    if (stats) *stats = st;
    return out;
}

TemporalEnsemble assemble_sector_ensemble(const BlockadedBasis& basis,
                                          const FragmentTable& table, int sector,
                                          const SparseOperator& h,
                                          const std::vector<std::size_t>& initial_ordinals,
                                          const EnsembleOptions& opts) {
    const ChainSpec& spec = basis.spec();
    if (opts.window.n_steps < 1)
        throw ConfigError("assemble_sector_ensemble: window must have at least one step");

    TemporalEnsemble ens;
    ens.sector = sector;
    ens.window = opts.window;
    std::map<SliomPattern, std::size_t> bin_of;
    for (std::size_t f = 0; f < table.fragments.size(); ++f) {
        if (table.sector_of[f] != sector) continue;
        bin_of[table.pattern_of[f]] = ens.patterns.size();
        ens.patterns.push_back(table.pattern_of[f]);
        ens.weights.push_back(static_cast<double>(table.fragments[f].size()));
    }
    if (ens.patterns.empty())
        throw ConfigError("assemble_sector_ensemble: sector has no fragments");
    ens.snapshots.resize(ens.patterns.size());

    const std::vector<double> times = opts.window.times();
    const int k_max = max_clusters(spec);

    // accept a measured bitstring into a bin when it decodes to the bin's
    // pattern and passes the active filters
    auto accept = [&](BitConfig bits, std::size_t bin) {
        if (!is_blockaded(bits, spec)) return;
        const auto decomp = decompose(bits, spec);
        if (opts.require_nc && decomp.n_clusters != sector) return;
        if (sliom_pattern(decomp, k_max) != ens.patterns[bin]) return;
        ens.snapshots[bin].push_back(bits);
    };

    const bool use_dense = opts.method == EvolveMethod::DenseSpectral ||
                           (opts.method == EvolveMethod::Auto && h.dim() <= 4096);
    std::unique_ptr<DensePropagator> prop;
    if (use_dense) prop = std::make_unique<DensePropagator>(h);  // shared across initials

    for (std::size_t init : initial_ordinals) {
        const BitConfig c0 = basis.state(init);
        const SliomPattern own = sliom_pattern_of(c0, spec, k_max);
        const auto own_it = bin_of.find(own);
        if (own_it == bin_of.end())
            throw ConfigError("assemble_sector_ensemble: initial state outside the sector");
        const SliomPattern mirrored = sliom_pattern_of(invert_config(c0, spec), spec, k_max);
        const auto mirror_it = bin_of.find(mirrored);

        std::vector<StateVector> states;
        if (use_dense) {
            const StateVector psi0 = unit_state(basis.size(), init);
            states.reserve(times.size());
            for (double t : times) states.push_back(prop->at(psi0, t));
        } else {
            EvolutionPlan plan;
            plan.hamiltonian = &h;
            plan.initial = unit_state(basis.size(), init);
            plan.times = times;
            plan.method = EvolveMethod::Iterative;
            plan.tolerance = opts.tolerance;
            states = evolve(plan);
        }
        const auto snaps =
            sample_snapshots(states, times, basis.states(), spec, opts.shots_per_time,
                             opts.spam_on ? &opts.spam : nullptr, opts.seed,
                             static_cast<std::uint64_t>(init));
        for (const Snapshot& s : snaps) {
            accept(s.bits, own_it->second);
            if (mirror_it != bin_of.end() && mirror_it->second != own_it->second)
                accept(invert_config(s.bits, spec), mirror_it->second);
        }
    }
    return ens;
}

EnsembleDistribution ensemble_distribution(const TemporalEnsemble& ensemble,
                                           const ChainSpec& spec) {
    const std::size_t n_bins = ensemble.patterns.size();
    if (n_bins == 0) throw ConfigError("ensemble_distribution: empty ensemble");

    std::vector<std::set<BitConfig>> distinct(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b)
        distinct[b].insert(ensemble.snapshots[b].begin(), ensemble.snapshots[b].end());

    std::string missing;
    for (std::size_t b = 0; b < n_bins; ++b) {
        if (!distinct[b].empty()) continue;
        if (!missing.empty()) missing += "; ";
        missing += pattern_to_string(ensemble.patterns[b]);
    }
    if (!missing.empty())
        throw ConfigError("ensemble_distribution: no accepted snapshots for patterns: " +
                          missing);

    EnsembleDistribution out;
    out.per_k.resize(static_cast<std::size_t>(ensemble.sector));
    for (int k = 1; k <= ensemble.sector; ++k)
        out.per_k[static_cast<std::size_t>(k - 1)].k = k;
    out.coverage.resize(n_bins, 0.0);

    double total_weight = 0.0;
    for (std::size_t b = 0; b < n_bins; ++b) {
        const double dim = ensemble.weights[b];
        out.coverage[b] = static_cast<double>(distinct[b].size()) / dim;
        const double per_state = dim / static_cast<double>(distinct[b].size());
        for (BitConfig bits : distinct[b]) {
            const auto decomp = decompose(bits, spec);
            for (const Cluster& cl : decomp.clusters) {
                if (cl.k > ensemble.sector) break;
                out.per_k[static_cast<std::size_t>(cl.k - 1)].weights[cl.doubled_center] +=
                    per_state;
            }
        }
        total_weight += dim;
    }
    for (auto& dist : out.per_k) dist.normalization = total_weight;
    out.min_coverage = *std::min_element(out.coverage.begin(), out.coverage.end());
    return out;
}

}  // namespace fraglab
