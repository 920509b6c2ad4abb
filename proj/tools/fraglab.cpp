// fraglab command line: basis and fragment tables, quench dynamics,
// simulated measurement ensembles, and cluster-statistics scaling sweeps.
// Every run writes its outputs plus a manifest.json into one directory.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fraglab/basis.hpp"
#include "fraglab/bigcomb.hpp"
#include "fraglab/distribution.hpp"
#include "fraglab/dynamics.hpp"
#include "fraglab/evolve.hpp"
#include "fraglab/fit.hpp"
#include "fraglab/fragments.hpp"
#include "fraglab/hamiltonians.hpp"
#include "fraglab/io.hpp"
#include "fraglab/lgtmap.hpp"
#include "fraglab/sliomstats.hpp"
#include "fraglab/sparse.hpp"
#include "fraglab/types.hpp"

namespace {

using nlohmann::json;
using namespace fraglab;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config file " + path + " must hold a JSON object");
    return cfg;
}

// flag wins over config file wins over built-in default
template <class T>
T pick(const CLI::Option* opt, const T& flag_value, const json& cfg, const char* key,
       const T& fallback) {
    if (opt != nullptr && opt->count() > 0) return flag_value;
    if (cfg.contains(key)) {
        try {
            return cfg.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config key '") + key + "': " + e.what());
        }
    }
    return fallback;
}

// "10:40:2" (inclusive range) or "10,12,20"
std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    if (text.empty()) return out;
    if (text.find(':') != std::string::npos) {
        int a = 0, b = 0, s = 1;
        char c1 = 0, c2 = 0;
        std::istringstream in(text);
        if (!(in >> a >> c1 >> b) || c1 != ':')
            throw ConfigError("bad range '" + text + "', expected start:stop[:step]");
        if (in >> c2 >> s) {
            if (c2 != ':' || s <= 0) throw ConfigError("bad range step in '" + text + "'");
        }
        for (int n = a; n <= b; n += s) out.push_back(n);
        return out;
    }
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

std::string big_str(const BigInt& v) { return v.str(); }

std::string physical_string(BitConfig c, const ChainSpec& spec) {
    return config_to_string(c, spec).substr(2, static_cast<std::size_t>(spec.n_atoms));
}

// ---------------------------------------------------------------- basis ----

void run_basis(int n_atoms, bool dump, ArtifactWriter& w) {
    const ChainSpec spec{n_atoms};
    const BigInt count = blockaded_count(n_atoms);
    json info;
    info["n_atoms"] = n_atoms;
    info["n_padded"] = spec.n_padded();
    info["n_sites"] = spec.n_sites();
    info["size"] = big_str(count);
    info["size_double"] = big_to_double(count);
    const bool enumerate = n_atoms <= 32;
    info["enumerated"] = enumerate;
    if (enumerate) {
        BlockadedBasis basis(spec);
        if (BigInt(basis.size()) != count)
            throw ConfigError("basis enumeration disagrees with the closed-form count");
        if (dump) {
            if (n_atoms > 24) throw CapacityError("basis dump capped at 24 atoms");
            std::string txt;
            txt.reserve(basis.size() * (spec.n_padded() + 10));
            for (std::size_t k = 0; k < basis.size(); ++k) {
                txt += std::to_string(k);
                txt += ' ';
                txt += config_to_string(basis.state(k), spec);
                txt += '\n';
            }
            w.write("basis.txt", txt);
        }
    } else if (dump) {
        throw CapacityError("basis dump capped at 24 atoms");
    }
    w.write("basis.json", info.dump(2) + "\n");
}

// ------------------------------------------------------------ fragments ----

void run_fragments(int n_atoms, bool live, bool dump_members, ArtifactWriter& w) {
    const SectorCensus census = build_census(n_atoms);
    json info;
    info["n_atoms"] = n_atoms;
    info["n_krylov"] = big_str(census.n_krylov);
    info["d_total"] = big_str(census.d_total);
    info["d_max"] = big_str(census.d_max);
    const BigRational fr = frozen_fraction(n_atoms);
    info["frozen_count"] = big_str(census.frozen_count);
    info["frozen_fraction"] = fr.value();
    const LargestSector ls = largest_sector(n_atoms);
    info["largest_sector"] = {{"exact", ls.exact},
                              {"estimate", ls.estimate},
                              {"dim", big_str(ls.dim)}};

    {
        std::ostringstream csv;
        csv << "n_q,n_0,n_c,inflated_pairs,dim,multiplicity\n";
        for (const CensusRow& r : census.rows)
            csv << r.n_q << ',' << r.n_0 << ',' << r.n_c << ',' << r.inflated_pairs << ','
                << big_str(r.dim) << ',' << big_str(r.multiplicity) << '\n';
        w.write("census.csv", csv.str());
    }
    {
        const int kmax = (n_atoms + 5) / 3;
        std::ostringstream csv;
        csv << "n_c,n_fragments,dim\n";
        for (int nc = 1; nc <= kmax; ++nc) {
            const BigInt d = sector_dim(n_atoms, nc);
            if (d == 0) continue;
            csv << nc << ',' << big_str(sector_fragment_count(nc)) << ',' << big_str(d) << '\n';
        }
        w.write("sectors.csv", csv.str());
    }

    if (live) {
        if (n_atoms > 26) throw CapacityError("live fragment search capped at 26 atoms");
        const ChainSpec spec{n_atoms};
        BlockadedBasis basis(spec);
        const FragmentTable table = find_fragments(basis);
        info["live_fragments"] = table.fragments.size();
        if (BigInt(table.fragments.size()) != census.n_krylov)
            throw ConfigError("live fragment count disagrees with the census");
        std::ostringstream csv;
        csv << "fragment,n_c,dim,pattern,smallest_member\n";
        for (std::size_t f = 0; f < table.fragments.size(); ++f)
            csv << f << ',' << table.sector_of[f] << ',' << table.fragments[f].size() << ','
                << pattern_to_string(table.pattern_of[f]) << ','
                << physical_string(basis.state(table.fragments[f].front()), spec) << '\n';
        w.write("fragments.csv", csv.str());

        if (n_atoms == 16) {
            // the five-cluster sector table with charge multiplets spelled out
            std::ostringstream t1;
            t1 << "fragment,pattern,n_q,n_0,dim\n";
            for (std::size_t f = 0; f < table.fragments.size(); ++f) {
                if (table.sector_of[f] != 5) continue;
                int nq = 0, n0 = 0;
                for (int8_t q : table.pattern_of[f]) {
                    if (q == 1) ++nq;
                    if (q == -1) ++n0;
                }
                t1 << f << ',' << pattern_to_string(table.pattern_of[f]) << ',' << nq << ','
                   << n0 << ',' << table.fragments[f].size() << '\n';
            }
            w.write("table_sector5.csv", t1.str());
        }
        if (dump_members) {
            std::ostringstream txt;
            for (std::size_t f = 0; f < table.fragments.size(); ++f) {
                txt << f << ':';
                for (std::uint32_t m : table.fragments[f]) txt << ' ' << m;
                txt << '\n';
            }
            w.write("members.txt", txt.str());
        }
    }
    w.write("fragments.json", info.dump(2) + "\n");
}

// --------------------------------------------------------------- quench ----

enum class Model { Lgt, Ryd, Pxq, Eff2, Disordered };

Model parse_model(const std::string& name) {
    if (name == "lgt") return Model::Lgt;
    if (name == "ryd") return Model::Ryd;
    if (name == "pxq") return Model::Pxq;
    if (name == "eff2") return Model::Eff2;
    if (name == "disordered") return Model::Disordered;
    throw ConfigError("unknown model '" + name + "' (lgt|ryd|pxq|eff2|disordered)");
}

const char* model_name(Model m) {
    switch (m) {
        case Model::Lgt: return "lgt";
        case Model::Ryd: return "ryd";
        case Model::Pxq: return "pxq";
        case Model::Eff2: return "eff2";
        case Model::Disordered: return "disordered";
    }
    return "?";
}

struct QuenchSpec {
    Model model = Model::Lgt;
    int n_atoms = 16;
    std::string init;       // physical bitstring, r/g
    double t_start = 0.0;   // us
    double t_end = 0.0;     // us; <= 0 means omega*t = 5.6
    int steps = 57;
    double delta = -1.0;    // ryd detuning; < 0 means pinned to v[1]
    double w_coupling = -1.0;  // lgt matrix element; < 0 means omega/2
    int max_range = 3;
    double sigma_r = 0.083;
    std::uint64_t seed = 1;
    EvolveMethod method = EvolveMethod::Auto;
    double tolerance = 1e-10;
};

EvolveMethod parse_method(const std::string& name) {
    if (name == "auto") return EvolveMethod::Auto;
    if (name == "dense") return EvolveMethod::DenseSpectral;
    if (name == "iterative") return EvolveMethod::Iterative;
    throw ConfigError("unknown method '" + name + "' (auto|dense|iterative)");
}

void run_quench(const QuenchSpec& q, ArtifactWriter& w) {
    const ChainSpec spec{q.n_atoms};
    const RydbergParams params = RydbergParams::defaults();
    if (static_cast<int>(q.init.size()) != q.n_atoms)
        throw ConfigError("--init must list exactly n_atoms characters");
    const BitConfig init = pad(q.init);

    const double t_end = q.t_end > 0.0 ? q.t_end : 5.6 / params.omega;
    if (q.steps < 2) throw ConfigError("--steps must be at least 2");
    Window window{q.t_start, t_end, q.steps};
    const std::vector<double> times = window.times();

    SparseOperator h;
    std::vector<BitConfig> basis_states;
    std::size_t init_ordinal = 0;
    json info;

    const bool blockaded = q.model != Model::Pxq;
    BlockadedBasis basis(spec);
    if (blockaded) {
        if (!basis.contains(init))
            throw ConfigError("--init violates the blockade for this model");
        init_ordinal = basis.index_of(init);
        basis_states = basis.states();
        switch (q.model) {
            case Model::Lgt:
                h = build_h_lgt(basis, q.w_coupling > 0 ? q.w_coupling : params.omega / 2.0);
                break;
            case Model::Eff2: h = build_h_eff2(basis, params.omega, params.v[1]); break;
            case Model::Ryd: {
                RydbergParams p = params;
                p.delta = q.delta >= 0 ? q.delta : params.v[1];
                h = build_h_ryd(basis, p, q.max_range);
                break;
            }
            case Model::Disordered: {
                const DisorderRealization real =
                    sample_disorder(spec, params, q.sigma_r, q.seed);
                RydbergParams p = params;
                p.delta = q.delta >= 0 ? q.delta : params.v[1];
                h = build_h_disordered(basis, p, real);
                break;
            }
            default: break;
        }
    } else {
        FullSpace full(spec);
        init_ordinal = full.index_of(init);
        basis_states.reserve(full.size());
        for (std::size_t k = 0; k < full.size(); ++k) basis_states.push_back(full.state(k));
        h = build_h_pxq(full, params.omega);
    }

    EvolutionPlan plan;
    plan.hamiltonian = &h;
    plan.initial = unit_state(h.dim(), init_ordinal);
    plan.times = times;
    plan.method = q.method;
    plan.tolerance = q.tolerance;
    const std::vector<StateVector> states = evolve(plan);

    {
        std::ostringstream csv;
        csv << "index,t_us,omega_t\n";
        for (std::size_t i = 0; i < times.size(); ++i)
            csv << i << ',' << format_g(times[i]) << ',' << format_g(params.omega * times[i])
                << '\n';
        w.write("times.csv", csv.str());
    }
    {
        const auto zz = z_autocorrelator(states, basis_states, spec, init);
        std::ostringstream csv;
        csv << "t_us,omega_t,atom,z_autocorr\n";
        for (std::size_t i = 0; i < times.size(); ++i)
            for (int a = 1; a <= q.n_atoms; ++a)
                csv << format_g(times[i]) << ',' << format_g(params.omega * times[i]) << ',' << a
                    << ',' << format_g(zz[a - 1][i]) << '\n';
        w.write("autocorr.csv", csv.str());
    }
    {
        const auto pops = site_populations(states, basis_states, spec);
        std::ostringstream csv;
        csv << "t_us,omega_t,atom,q_mean\n";
        for (std::size_t i = 0; i < times.size(); ++i)
            for (int a = 1; a <= q.n_atoms; ++a)
                csv << format_g(times[i]) << ',' << format_g(params.omega * times[i]) << ',' << a
                    << ',' << format_g(pops[a - 1][i]) << '\n';
        w.write("populations.csv", csv.str());
    }

    const std::vector<double> pbar = microstate_projections(states);
    double in_frag_weight = -1.0;
    if (blockaded) {
        const FragmentTable table = find_fragments(basis);
        const std::uint32_t fid = table.fragment_of[init_ordinal];
        const ClusterDecomposition dec = decompose(init, spec);
        info["init_fragment"] = fid;
        info["init_fragment_dim"] = table.fragments[fid].size();
        info["init_pattern"] = pattern_to_string(table.pattern_of[fid]);
        info["init_sector"] = dec.n_clusters;
        in_frag_weight = 0.0;
        for (std::uint32_t m : table.fragments[fid]) in_frag_weight += pbar[m];
        info["in_fragment_weight"] = in_frag_weight;

        std::ostringstream csv;
        csv << "ordinal,config,pbar,in_fragment\n";
        for (std::size_t s = 0; s < pbar.size(); ++s)
            csv << s << ',' << physical_string(basis_states[s], spec) << ','
                << format_g(pbar[s]) << ',' << (table.fragment_of[s] == fid ? 1 : 0) << '\n';
        w.write("pbar.csv", csv.str());
    } else {
        std::ostringstream csv;
        csv << "ordinal,config,pbar\n";
        for (std::size_t s = 0; s < pbar.size(); ++s)
            csv << s << ',' << physical_string(basis_states[s], spec) << ','
                << format_g(pbar[s]) << '\n';
        w.write("pbar.csv", csv.str());
    }

    // conservation diagnostics over the run
    double norm_dev = 0.0, e0 = 0.0, e_dev = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const StateVector& psi = states[i];
        double n2 = 0.0;
        for (const auto& c : psi) n2 += std::norm(c);
        norm_dev = std::max(norm_dev, std::abs(std::sqrt(n2) - 1.0));
        StateVector hpsi(psi.size());
        h.apply(psi, hpsi);
        double e = 0.0;
        for (std::size_t s = 0; s < psi.size(); ++s)
            e += (std::conj(psi[s]) * hpsi[s]).real();
        if (i == 0)
            e0 = e;
        else
            e_dev = std::max(e_dev, std::abs(e - e0));
    }
    info["model"] = model_name(q.model);
    info["dim"] = h.dim();
    info["init_ordinal"] = init_ordinal;
    info["norm_max_dev"] = norm_dev;
    info["energy_max_dev"] = e_dev;
    info["energy_initial"] = e0;
    w.write("quench.json", info.dump(2) + "\n");
}

// ------------------------------------------------------------- ensemble ----

const std::vector<std::string>& prepared_inits_16_sector5() {
    static const std::vector<std::string> inits = {
        "rggggrggggrggggr",  // ccccc
        "rgggggrggrgggggr",  // cncnc
        "rgggggrgggrggggr",  // cnncc
        "grggggrggrggggrg",  // ncccn
        "grggggrggggrgggr",  // nccnc
        "grggggrgggrggggr",  // ncncc
        "grgggrggggrggggr",  // nnccc
        "grgggrggggrgggrg",  // nncnn
        "grgggrgggggrggrg",  // nnncn
        "grgggrgggggrgggr",  // nnnnc
    };
    return inits;
}

struct EnsembleSpec {
    int n_atoms = 16;
    int sector = 5;
    Model model = Model::Ryd;
    int shots = 200;
    std::uint64_t seed = 1;
    bool spam_on = false;
    bool require_nc = false;
    std::vector<std::string> inits;  // empty -> prepared set / auto representatives
    double wt_start = 0.56;          // window in omega*t
    double wt_end = 5.60;
    int wt_steps = 19;
    EvolveMethod method = EvolveMethod::Auto;
    bool per_bin_hist = false;
};

// one initial per mirror pair of sector fragments, smallest member first
std::vector<std::size_t> auto_representatives(const FragmentTable& table, int sector) {
    std::map<std::string, std::size_t> bin_of;
    std::vector<std::size_t> bins;
    for (std::size_t f = 0; f < table.fragments.size(); ++f)
        if (table.sector_of[f] == sector) {
            bin_of[pattern_to_string(table.pattern_of[f])] = f;
            bins.push_back(f);
        }
    if (bins.empty()) throw ConfigError("sector has no fragments");
    std::set<std::string> covered;
    std::vector<std::size_t> inits;
    for (std::size_t f : bins) {
        const std::string own = pattern_to_string(table.pattern_of[f]);
        if (covered.count(own)) continue;
        SliomPattern mirror = table.pattern_of[f];
        std::reverse(mirror.begin(), mirror.end());
        covered.insert(own);
        covered.insert(pattern_to_string(mirror));
        inits.push_back(table.fragments[f].front());
    }
    return inits;
}

void run_ensemble(const EnsembleSpec& e, ArtifactWriter& w) {
    const ChainSpec spec{e.n_atoms};
    const RydbergParams params = RydbergParams::defaults();
    BlockadedBasis basis(spec);
    const FragmentTable table = find_fragments(basis);

    SparseOperator h;
    switch (e.model) {
        case Model::Ryd: {
            RydbergParams p = params;
            p.delta = params.v[1];
            h = build_h_ryd(basis, p, 3);
            break;
        }
        case Model::Lgt: h = build_h_lgt(basis, params.omega / 2.0); break;
        case Model::Eff2: h = build_h_eff2(basis, params.omega, params.v[1]); break;
        default: throw ConfigError("ensemble supports models lgt, ryd, eff2");
    }

    std::vector<std::size_t> initial_ordinals;
    if (!e.inits.empty()) {
        for (const std::string& s : e.inits) {
            if (static_cast<int>(s.size()) != e.n_atoms)
                throw ConfigError("initial state '" + s + "' does not match n_atoms");
            const BitConfig c = pad(s);
            if (!basis.contains(c))
                throw ConfigError("initial state '" + s + "' violates the blockade");
            initial_ordinals.push_back(basis.index_of(c));
        }
    } else if (e.n_atoms == 16 && e.sector == 5) {
        for (const std::string& s : prepared_inits_16_sector5())
            initial_ordinals.push_back(basis.index_of(pad(s)));
    } else {
        initial_ordinals = auto_representatives(table, e.sector);
    }

    EnsembleOptions opts;
    opts.window = Window{e.wt_start / params.omega, e.wt_end / params.omega, e.wt_steps};
    opts.shots_per_time = e.shots;
    opts.spam_on = e.spam_on;
    opts.require_nc = e.require_nc;
    opts.seed = e.seed;
    opts.method = e.method;

    const TemporalEnsemble ens =
        assemble_sector_ensemble(basis, table, e.sector, h, initial_ordinals, opts);
    const EnsembleDistribution dist = ensemble_distribution(ens, spec);
    const std::vector<ExactDistribution> theory = analytic_distributions(e.n_atoms, e.sector);

    {
        std::ostringstream csv;
        csv << "k,doubled_position,position,weight\n";
        for (const SliomDistribution& d : dist.per_k)
            for (const auto& [pos, wt] : d.weights)
                csv << d.k << ',' << pos << ',' << format_g(pos / 2.0) << ','
                    << format_g(wt / d.normalization) << '\n';
        w.write("ensemble.csv", csv.str());
    }
    {
        std::ostringstream csv;
        csv << "k,doubled_position,position,weight\n";
        for (const ExactDistribution& d : theory) {
            const SliomDistribution s = d.to_weights();
            for (const auto& [pos, wt] : s.weights)
                csv << s.k << ',' << pos << ',' << format_g(pos / 2.0) << ','
                    << format_g(wt / s.normalization) << '\n';
        }
        w.write("theory.csv", csv.str());
    }

    json info;
    double tv_max = 0.0, tv_sum = 0.0;
    {
        std::ostringstream csv;
        csv << "k,total_variation\n";
        for (const SliomDistribution& d : dist.per_k) {
            const auto it = std::find_if(theory.begin(), theory.end(),
                                         [&](const ExactDistribution& t) { return t.k == d.k; });
            if (it == theory.end()) throw ConfigError("no analytic reference for k");
            const double tv = total_variation(d, it->to_weights());
            tv_max = std::max(tv_max, tv);
            tv_sum += tv;
            csv << d.k << ',' << format_g(tv) << '\n';
        }
        w.write("tv.csv", csv.str());
    }
    {
        std::ostringstream csv;
        csv << "bin,pattern,dim,snapshots,distinct,coverage\n";
        for (std::size_t b = 0; b < ens.patterns.size(); ++b) {
            std::set<BitConfig> distinct(ens.snapshots[b].begin(), ens.snapshots[b].end());
            csv << b << ',' << pattern_to_string(ens.patterns[b]) << ','
                << format_g(ens.weights[b]) << ',' << ens.snapshots[b].size() << ','
                << distinct.size() << ',' << format_g(dist.coverage[b]) << '\n';
        }
        w.write("coverage.csv", csv.str());
    }
    if (e.per_bin_hist) {
        std::ostringstream csv;
        csv << "bin,pattern,k,doubled_position,position,weight\n";
        for (std::size_t b = 0; b < ens.patterns.size(); ++b) {
            std::set<BitConfig> distinct(ens.snapshots[b].begin(), ens.snapshots[b].end());
            if (distinct.empty()) continue;
            std::map<int, std::map<int, double>> hist;
            for (BitConfig c : distinct) {
                const ClusterDecomposition dec = decompose(c, spec);
                for (int k = 1; k <= dec.n_clusters; ++k)
                    hist[k][dec.clusters[static_cast<std::size_t>(k - 1)].doubled_center] +=
                        1.0 / static_cast<double>(distinct.size());
            }
            for (const auto& [k, m] : hist)
                for (const auto& [pos, wt] : m)
                    csv << b << ',' << pattern_to_string(ens.patterns[b]) << ',' << k << ','
                        << pos << ',' << format_g(pos / 2.0) << ',' << format_g(wt) << '\n';
        }
        w.write("bins.csv", csv.str());
    }

    std::size_t total_snaps = 0;
    for (const auto& v : ens.snapshots) total_snaps += v.size();
    info["bins"] = ens.patterns.size();
    info["initial_states"] = initial_ordinals.size();
    info["snapshots_kept"] = total_snaps;
    info["min_coverage"] = dist.min_coverage;
    info["tv_max"] = tv_max;
    info["tv_mean"] = tv_sum / static_cast<double>(dist.per_k.size());
    w.write("ensemble.json", info.dump(2) + "\n");
}

// -------------------------------------------------------------- scaling ----

struct ScalingSpec {
    bool bulk = false;
    bool boundary = false;
    bool center = false;
    std::vector<int> n_list;        // empty -> per-kind default
    std::vector<int> collapse_list; // empty -> skip
    int peak_n = 0;                 // 0 -> skip
};

void write_scaling(const ScalingResult& r, const char* kind, ArtifactWriter& w) {
    json info;
    info["kind"] = kind;
    info["alpha"] = r.alpha;
    info["alpha_stderr"] = r.alpha_stderr;
    w.write(std::string("scaling_") + kind + ".json", info.dump(2) + "\n");
    std::ostringstream csv;
    csv << "n_atoms,sigma_over_n\n";
    for (std::size_t i = 0; i < r.n_values.size(); ++i)
        csv << format_g(r.n_values[i]) << ',' << format_g(r.sigma_over_n[i]) << '\n';
    w.write(std::string("widths_") + kind + ".csv", csv.str());
}

void run_scaling(const ScalingSpec& s, ArtifactWriter& w) {
    auto pick_list = [&](int lo, int hi, int step) {
        if (!s.n_list.empty()) return s.n_list;
        std::vector<int> out;
        for (int n = lo; n <= hi; n += step) out.push_back(n);
        return out;
    };
    if (s.boundary)
        write_scaling(scaling_exponent(pick_list(50, 200, 10), ScalingWhich::Boundary),
                      "boundary", w);
    if (s.bulk)
        write_scaling(scaling_exponent(pick_list(50, 200, 10), ScalingWhich::Bulk), "bulk", w);
    if (s.center)
        write_scaling(scaling_exponent(pick_list(90, 450, 10), ScalingWhich::Center), "center",
                      w);
    if (!s.collapse_list.empty()) {
        const CollapseResult col = scaling_collapse(s.collapse_list);
        json info;
        info["max_sup_even"] = col.max_sup_even;
        info["max_sup_odd"] = col.max_sup_odd;
        w.write("collapse.json", info.dump(2) + "\n");
        std::ostringstream csv;
        csv << "n_atoms,parity,u,h\n";
        auto emit = [&](const std::vector<CollapseCurve>& curves, int parity) {
            for (const CollapseCurve& c : curves)
                for (std::size_t i = 0; i < c.u.size(); ++i)
                    csv << c.n_a << ',' << parity << ',' << format_g(c.u[i]) << ','
                        << format_g(c.h[i]) << '\n';
        };
        emit(col.even, 0);
        emit(col.odd, 1);
        w.write("collapse.csv", csv.str());
    }
    if (s.peak_n > 0) {
        const PeakRatioResult pk = peak_ratio(s.peak_n);
        json info;
        info["n_atoms"] = s.peak_n;
        info["ratio"] = pk.ratio;
        info["sector"] = pk.sector;
        info["k_center"] = pk.k_center;
        info["dim_ratio"] = pk.dim_ratio;
        w.write("peak.json", info.dump(2) + "\n");
    }
}

// -------------------------------------------------------------- recipes ----

json quench_config(const QuenchSpec& q) {
    json cfg;
    cfg["model"] = model_name(q.model);
    cfg["n_atoms"] = q.n_atoms;
    cfg["init"] = q.init;
    cfg["t_start"] = q.t_start;
    cfg["t_end"] = q.t_end;
    cfg["steps"] = q.steps;
    cfg["seed"] = q.seed;
    return cfg;
}

void recipe_census_sweep(ArtifactWriter& w) {
    std::ostringstream csv;
    csv << "n_atoms,n_krylov,d_total,frozen_fraction\n";
    BigInt k10, k40;
    double fr40 = 0.0;
    for (int na = 10; na <= 40; ++na) {
        const SectorCensus c = build_census(na);
        const double fr = frozen_fraction(na).value();
        csv << na << ',' << big_str(c.n_krylov) << ',' << big_str(c.d_total) << ','
            << format_g(fr) << '\n';
        if (na == 10) k10 = c.n_krylov;
        if (na == 40) {
            k40 = c.n_krylov;
            fr40 = fr;
        }
    }
    w.write("census_sweep.csv", csv.str());
    json info;
    info["growth_rate"] = std::pow(big_to_double(k40) / big_to_double(k10), 1.0 / 30.0);
    info["frozen_fraction_40"] = fr40;
    w.write("sweep.json", info.dump(2) + "\n");
}

void recipe_disorder(std::uint64_t seed_base, ArtifactWriter& w) {
    const int n_atoms = 16;
    const ChainSpec spec{n_atoms};
    const RydbergParams params = RydbergParams::defaults();
    BlockadedBasis basis(spec);
    const FragmentTable table = find_fragments(basis);

    const std::string init_s = "grgggrggggrggggr";
    const BitConfig init = pad(init_s);
    const std::size_t a0 = basis.index_of(init);
    const std::uint32_t fid = table.fragment_of[a0];
    const std::vector<std::uint32_t>& frag = table.fragments[fid];

    Window window{7.0 / params.omega, 14.0 / params.omega, 29};
    const std::vector<double> times = window.times();

    auto pbar_of = [&](const SparseOperator& h) {
        EvolutionPlan plan;
        plan.hamiltonian = &h;
        plan.initial = unit_state(h.dim(), a0);
        plan.times = times;
        return microstate_projections(evolve(plan));
    };
    auto in_frag = [&](const std::vector<double>& pbar) {
        std::vector<double> p;
        p.reserve(frag.size());
        double tot = 0.0;
        for (std::uint32_t m : frag) {
            p.push_back(pbar[m]);
            tot += pbar[m];
        }
        for (double& x : p) x /= tot;
        return std::make_pair(p, tot);
    };

    RydbergParams p = params;
    p.delta = params.v[1];
    const auto [pc, wc] = in_frag(pbar_of(build_h_ryd(basis, p, 3)));
    const double ratio_clean =
        *std::max_element(pc.begin(), pc.end()) / *std::min_element(pc.begin(), pc.end());

    std::ostringstream csv;
    csv << "seed,in_fragment_weight,tv_vs_clean,spread_ratio,spread_over_clean\n";
    csv << "clean," << format_g(wc) << ",0," << format_g(ratio_clean) << ",1\n";
    json info;
    info["init"] = init_s;
    info["fragment_dim"] = frag.size();
    info["clean_in_fragment_weight"] = wc;
    for (std::uint64_t s = 0; s < 4; ++s) {
        const std::uint64_t seed = seed_base + s;
        const DisorderRealization real = sample_disorder(spec, params, 0.083, seed);
        const auto [pd, wd] = in_frag(pbar_of(build_h_disordered(basis, p, real)));
        double tv = 0.0;
        for (std::size_t i = 0; i < pd.size(); ++i) tv += std::abs(pd[i] - pc[i]);
        tv *= 0.5;
        const double rd =
            *std::max_element(pd.begin(), pd.end()) / *std::min_element(pd.begin(), pd.end());
        csv << seed << ',' << format_g(wd) << ',' << format_g(tv) << ',' << format_g(rd) << ','
            << format_g(rd / ratio_clean) << '\n';
    }
    w.write("disorder.csv", csv.str());
    w.write("disorder.json", info.dump(2) + "\n");
}

int run_recipe(const std::string& name, const std::filesystem::path& out_root,
               std::uint64_t seed) {
    Timer timer;
    const std::filesystem::path dir = out_root / name;
    const RydbergParams params = RydbergParams::defaults();
    const double t56 = 5.6 / params.omega;

    auto quench_recipe = [&](QuenchSpec q) {
        q.seed = seed;
        ArtifactWriter w(dir, "recipe " + name, quench_config(q));
        run_quench(q, w);
        w.finish(timer.ms());
    };
    auto ensemble_recipe = [&](EnsembleSpec e) {
        e.seed = seed;
        json cfg;
        cfg["n_atoms"] = e.n_atoms;
        cfg["sector"] = e.sector;
        cfg["shots"] = e.shots;
        cfg["seed"] = e.seed;
        cfg["spam"] = e.spam_on ? "on" : "off";
        cfg["postselect"] = e.require_nc ? "blockade,nc=5" : "blockade";
        ArtifactWriter w(dir, "recipe " + name, cfg);
        run_ensemble(e, w);
        w.finish(timer.ms());
    };
    auto scaling_recipe = [&](const ScalingSpec& s, json cfg) {
        ArtifactWriter w(dir, "recipe " + name, std::move(cfg));
        run_scaling(s, w);
        w.finish(timer.ms());
    };

    if (name == "fig2a-lgt") {
        QuenchSpec q;
        q.model = Model::Lgt;
        q.init = "rggggrggggrggggr";
        q.t_end = t56;
        q.steps = 57;
        quench_recipe(q);
    } else if (name == "fig2a-pxq") {
        QuenchSpec q;
        q.model = Model::Pxq;
        q.init = "rggggrggggrggggr";
        q.t_end = t56;
        q.steps = 57;
        quench_recipe(q);
    } else if (name == "fig2b") {
        QuenchSpec q;
        q.model = Model::Ryd;
        q.init = "grggggrgggrggggr";
        q.t_start = 0.56 / params.omega;
        q.t_end = t56;
        q.steps = 19;
        quench_recipe(q);
    } else if (name == "fig3a") {
        QuenchSpec q;
        q.model = Model::Lgt;
        q.init = "ggggggrggrgggggg";
        q.t_end = 30.0 / params.omega;
        q.steps = 121;
        quench_recipe(q);
    } else if (name == "fig3b") {
        QuenchSpec q;
        q.model = Model::Lgt;
        q.init = "rggrggrggrggrggr";
        q.t_end = 30.0 / params.omega;
        q.steps = 121;
        quench_recipe(q);
    } else if (name == "fig4b") {
        EnsembleSpec e;
        e.per_bin_hist = true;
        ensemble_recipe(e);
    } else if (name == "fig4c") {
        EnsembleSpec e;
        ensemble_recipe(e);
    } else if (name == "fig4d") {
        ScalingSpec s;
        s.bulk = true;
        s.boundary = true;
        scaling_recipe(s, {{"n_list", "50:200:10"}});
    } else if (name == "ext6") {
        ArtifactWriter w(dir, "recipe " + name, {{"n_atoms", "10..40"}});
        recipe_census_sweep(w);
        w.finish(timer.ms());
    } else if (name == "ext7") {
        ScalingSpec s;
        s.center = true;
        s.collapse_list = {90, 110, 200, 300, 430, 450};
        s.peak_n = 550;
        scaling_recipe(s, {{"n_list", "90:450:10"}, {"collapse", "90,110,200,300,430,450"},
                           {"peak_n", 550}});
    } else if (name == "ext8") {
        ArtifactWriter w(dir, "recipe " + name,
                         {{"sigma_r", 0.083}, {"seed", seed}, {"window_omega_t", "7:14:29"}});
        recipe_disorder(seed, w);
        w.finish(timer.ms());
    } else if (name == "ext9") {
        EnsembleSpec e;
        e.spam_on = true;
        e.require_nc = true;
        ensemble_recipe(e);
    } else {
        throw ConfigError(
            "unknown recipe '" + name +
            "' (fig2a-lgt fig2a-pxq fig2b fig3a fig3b fig4b fig4c fig4d ext6 ext7 ext8 ext9)");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraglab: Krylov fragmentation laboratory for constrained Rydberg chains"};
    app.require_subcommand(1);

    // shared options, registered per subcommand
    struct Common {
        std::string config_path;
        std::string out = "artifacts";
        std::uint64_t seed = 1;
        CLI::Option* seed_opt = nullptr;
    };
    auto add_common = [](CLI::App* cmd, Common& c) {
        cmd->add_option("--config", c.config_path, "JSON config file; flags override its keys");
        cmd->add_option("--out", c.out, "output directory");
        c.seed_opt = cmd->add_option("--seed", c.seed, "random stream seed");
    };

    Common c_basis, c_frag, c_quench, c_ens, c_scal, c_recipe;

    auto* cmd_basis = app.add_subcommand("basis", "count and enumerate the blockaded basis");
    int b_na = 16;
    bool b_dump = false;
    CLI::Option* b_na_opt = cmd_basis->add_option("--n-atoms", b_na, "physical chain length");
    cmd_basis->add_flag("--dump", b_dump, "write every basis state to basis.txt");
    add_common(cmd_basis, c_basis);

    auto* cmd_frag =
        app.add_subcommand("fragments", "fragment census, sector tables, live partition");
    int f_na = 16;
    bool f_live = false, f_no_live = false, f_members = false;
    CLI::Option* f_na_opt = cmd_frag->add_option("--n-atoms", f_na, "physical chain length");
    cmd_frag->add_flag("--live", f_live, "force the explicit basis walk");
    cmd_frag->add_flag("--no-live", f_no_live, "skip the explicit basis walk");
    cmd_frag->add_flag("--dump-members", f_members, "write fragment membership lists");
    add_common(cmd_frag, c_frag);

    auto* cmd_quench = app.add_subcommand("quench", "evolve one product state and record it");
    std::string q_model = "lgt", q_init, q_method = "auto";
    int q_na = 16, q_steps = 57, q_range = 3;
    double q_tmax = 0.0, q_tstart = 0.0, q_delta = -1.0, q_w = -1.0, q_sigma = 0.083,
           q_tol = 1e-10;
    CLI::Option* q_model_opt =
        cmd_quench->add_option("--model", q_model, "lgt|ryd|pxq|eff2|disordered");
    CLI::Option* q_init_opt = cmd_quench->add_option("--init", q_init, "physical r/g string");
    CLI::Option* q_na_opt = cmd_quench->add_option("--n-atoms", q_na, "physical chain length");
    CLI::Option* q_tmax_opt = cmd_quench->add_option("--tmax", q_tmax, "final time, us");
    CLI::Option* q_tstart_opt = cmd_quench->add_option("--tstart", q_tstart, "first time, us");
    CLI::Option* q_steps_opt = cmd_quench->add_option("--steps", q_steps, "time grid points");
    CLI::Option* q_delta_opt = cmd_quench->add_option("--delta", q_delta, "detuning, rad/us");
    CLI::Option* q_w_opt = cmd_quench->add_option("--w", q_w, "gauge coupling, rad/us");
    CLI::Option* q_range_opt =
        cmd_quench->add_option("--max-range", q_range, "interaction range, sites");
    CLI::Option* q_sigma_opt =
        cmd_quench->add_option("--sigma-r", q_sigma, "radial position spread, um");
    CLI::Option* q_method_opt =
        cmd_quench->add_option("--method", q_method, "auto|dense|iterative");
    CLI::Option* q_tol_opt = cmd_quench->add_option("--tolerance", q_tol, "iterative budget");
    add_common(cmd_quench, c_quench);

    auto* cmd_ens =
        app.add_subcommand("ensemble", "quench, measure, post-select, bin by fragment");
    std::string e_model = "ryd", e_spam = "off", e_post = "blockade", e_inits;
    int e_na = 16, e_sector = 5, e_shots = 200;
    std::string e_window = "0.56:5.6:19";
    bool e_hist = false;
    CLI::Option* e_na_opt = cmd_ens->add_option("--n-atoms", e_na, "physical chain length");
    CLI::Option* e_sector_opt = cmd_ens->add_option("--sector", e_sector, "cluster count");
    CLI::Option* e_model_opt = cmd_ens->add_option("--model", e_model, "lgt|ryd|eff2");
    CLI::Option* e_shots_opt = cmd_ens->add_option("--shots", e_shots, "shots per time point");
    CLI::Option* e_spam_opt = cmd_ens->add_option("--spam", e_spam, "readout errors: on|off");
    CLI::Option* e_post_opt =
        cmd_ens->add_option("--postselect", e_post, "blockade or blockade,nc=K");
    CLI::Option* e_inits_opt =
        cmd_ens->add_option("--inits", e_inits, "comma-separated r/g strings");
    CLI::Option* e_window_opt =
        cmd_ens->add_option("--window", e_window, "omega*t window start:stop:points");
    cmd_ens->add_flag("--per-bin-hist", e_hist, "also write per-fragment histograms");
    add_common(cmd_ens, c_ens);

    auto* cmd_scal = app.add_subcommand("scaling", "cluster-width scaling and collapse");
    std::string s_which = "all", s_nlist, s_collapse;
    int s_peak = 0;
    CLI::Option* s_which_opt =
        cmd_scal->add_option("--which", s_which, "bulk|boundary|center|all, comma ok");
    CLI::Option* s_nlist_opt =
        cmd_scal->add_option("--n-list", s_nlist, "sizes, start:stop:step or comma list");
    CLI::Option* s_collapse_opt =
        cmd_scal->add_option("--collapse", s_collapse, "sizes for the rescaled overlay");
    CLI::Option* s_peak_opt =
        cmd_scal->add_option("--peak-n", s_peak, "size for the sublattice peak ratio");
    add_common(cmd_scal, c_scal);

    auto* cmd_recipe = app.add_subcommand("recipe", "pinned end-to-end runs");
    std::string r_name;
    cmd_recipe->add_option("name", r_name, "recipe name")->required();
    add_common(cmd_recipe, c_recipe);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    Timer timer;
    try {
        if (cmd_basis->parsed()) {
            const json cfg = load_config(c_basis.config_path);
            const int na = pick(b_na_opt, b_na, cfg, "n_atoms", 16);
            const bool dump = b_dump || cfg.value("dump", false);
            json resolved{{"n_atoms", na}, {"dump", dump}};
            ArtifactWriter w(c_basis.out, "basis", resolved);
            run_basis(na, dump, w);
            w.finish(timer.ms());
        } else if (cmd_frag->parsed()) {
            const json cfg = load_config(c_frag.config_path);
            const int na = pick(f_na_opt, f_na, cfg, "n_atoms", 16);
            bool live = na <= 20;
            if (f_live || cfg.value("live", false)) live = true;
            if (f_no_live) live = false;
            const bool members = f_members || cfg.value("dump_members", false);
            json resolved{{"n_atoms", na}, {"live", live}, {"dump_members", members}};
            ArtifactWriter w(c_frag.out, "fragments", resolved);
            run_fragments(na, live, members, w);
            w.finish(timer.ms());
        } else if (cmd_quench->parsed()) {
            const json cfg = load_config(c_quench.config_path);
            QuenchSpec q;
            q.model = parse_model(pick(q_model_opt, q_model, cfg, "model", std::string("lgt")));
            q.n_atoms = pick(q_na_opt, q_na, cfg, "n_atoms", 16);
            q.init = pick(q_init_opt, q_init, cfg, "init", std::string());
            if (q.init.empty()) throw ConfigError("--init is required for quench");
            q.t_start = pick(q_tstart_opt, q_tstart, cfg, "t_start", 0.0);
            q.t_end = pick(q_tmax_opt, q_tmax, cfg, "t_max", 0.0);
            q.steps = pick(q_steps_opt, q_steps, cfg, "steps", 57);
            q.delta = pick(q_delta_opt, q_delta, cfg, "delta", -1.0);
            q.w_coupling = pick(q_w_opt, q_w, cfg, "w", -1.0);
            q.max_range = pick(q_range_opt, q_range, cfg, "max_range", 3);
            q.sigma_r = pick(q_sigma_opt, q_sigma, cfg, "sigma_r", 0.083);
            q.seed = pick(c_quench.seed_opt, c_quench.seed, cfg, "seed", std::uint64_t{1});
            q.method = parse_method(pick(q_method_opt, q_method, cfg, "method",
                                         std::string("auto")));
            q.tolerance = pick(q_tol_opt, q_tol, cfg, "tolerance", 1e-10);
            json resolved{{"model", model_name(q.model)}, {"n_atoms", q.n_atoms},
                          {"init", q.init},               {"t_start", q.t_start},
                          {"t_max", q.t_end},             {"steps", q.steps},
                          {"delta", q.delta},             {"w", q.w_coupling},
                          {"max_range", q.max_range},     {"sigma_r", q.sigma_r},
                          {"seed", q.seed},               {"tolerance", q.tolerance}};
            ArtifactWriter w(c_quench.out, "quench", resolved);
            run_quench(q, w);
            w.finish(timer.ms());
        } else if (cmd_ens->parsed()) {
            const json cfg = load_config(c_ens.config_path);
            EnsembleSpec e;
            e.n_atoms = pick(e_na_opt, e_na, cfg, "n_atoms", 16);
            e.sector = pick(e_sector_opt, e_sector, cfg, "sector", 5);
            e.model = parse_model(pick(e_model_opt, e_model, cfg, "model", std::string("ryd")));
            e.shots = pick(e_shots_opt, e_shots, cfg, "shots", 200);
            e.seed = pick(c_ens.seed_opt, c_ens.seed, cfg, "seed", std::uint64_t{1});
            const std::string spam = pick(e_spam_opt, e_spam, cfg, "spam", std::string("off"));
            if (spam != "on" && spam != "off") throw ConfigError("--spam takes on|off");
            e.spam_on = spam == "on";
            const std::string post =
                pick(e_post_opt, e_post, cfg, "postselect", std::string("blockade"));
            if (post.rfind("blockade", 0) != 0)
                throw ConfigError("--postselect starts with 'blockade'");
            if (const auto p = post.find("nc="); p != std::string::npos) {
                const int nc = std::stoi(post.substr(p + 3));
                if (nc != e.sector)
                    throw ConfigError("cluster-count filter must equal the binned sector");
                e.require_nc = true;
            }
            const std::string inits = pick(e_inits_opt, e_inits, cfg, "inits", std::string());
            e.inits = split_csv(inits);
            const std::string win =
                pick(e_window_opt, e_window, cfg, "window", std::string("0.56:5.6:19"));
            {
                std::istringstream in(win);
                char c1 = 0, c2 = 0;
                if (!(in >> e.wt_start >> c1 >> e.wt_end >> c2 >> e.wt_steps) || c1 != ':' ||
                    c2 != ':')
                    throw ConfigError("--window takes start:stop:points in omega*t");
            }
            e.per_bin_hist = e_hist || cfg.value("per_bin_hist", false);
            json resolved{{"n_atoms", e.n_atoms}, {"sector", e.sector},
                          {"model", model_name(e.model)}, {"shots", e.shots},
                          {"seed", e.seed},       {"spam", spam},
                          {"postselect", post},   {"inits", inits},
                          {"window", win},        {"per_bin_hist", e.per_bin_hist}};
            ArtifactWriter w(c_ens.out, "ensemble", resolved);
            run_ensemble(e, w);
            w.finish(timer.ms());
        } else if (cmd_scal->parsed()) {
            const json cfg = load_config(c_scal.config_path);
            ScalingSpec s;
            const std::string which =
                pick(s_which_opt, s_which, cfg, "which", std::string("all"));
            for (const std::string& tok : split_csv(which)) {
                if (tok == "all") s.bulk = s.boundary = s.center = true;
                else if (tok == "bulk") s.bulk = true;
                else if (tok == "boundary") s.boundary = true;
                else if (tok == "center") s.center = true;
                else throw ConfigError("unknown --which token '" + tok + "'");
            }
            s.n_list = parse_int_list(pick(s_nlist_opt, s_nlist, cfg, "n_list", std::string()));
            s.collapse_list =
                parse_int_list(pick(s_collapse_opt, s_collapse, cfg, "collapse", std::string()));
            s.peak_n = pick(s_peak_opt, s_peak, cfg, "peak_n", 0);
            json resolved{{"which", which},
                          {"n_list", s_nlist},
                          {"collapse", s_collapse},
                          {"peak_n", s.peak_n}};
            ArtifactWriter w(c_scal.out, "scaling", resolved);
            run_scaling(s, w);
            w.finish(timer.ms());
        } else if (cmd_recipe->parsed()) {
            return run_recipe(r_name, c_recipe.out, c_recipe.seed);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return 3;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
