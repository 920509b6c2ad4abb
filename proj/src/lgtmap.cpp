#include "fraglab/lgtmap.hpp"

#include "fraglab/basis.hpp"

namespace fraglab {

ClusterDecomposition decompose(BitConfig c, const ChainSpec& spec) {
    if (!has_g_padding(c, spec)) throw ConfigError("decompose: config padding atoms must be g");
    if (!is_blockaded(c, spec)) throw ConfigError("decompose: config violates blockade");

    ClusterDecomposition out;
    const int n = spec.n_padded();

    // scan maximal g-runs; a run of m atoms covers the m-1 matter sites
    // strictly inside it (single g atoms between two r's cover none and
    // belong to the vacuum separator)
    int i = 1;
    int prev_right = 0;  // right site of the previous cluster
    while (i <= n) {
        if (atom_is_r(c, i, spec)) {
            ++i;
            continue;
        }
        int j = i;
        while (j < n && !atom_is_r(c, j + 1, spec)) ++j;
        if (j > i) {  // run of length >= 2: sites i .. j-1
            Cluster cl;
            cl.k = static_cast<int>(out.clusters.size()) + 1;
            cl.left_site = i;
            cl.right_site = j - 1;
            cl.site_length = cl.right_site - cl.left_site + 1;
            cl.doubled_center = cl.left_site + cl.right_site;
            cl.charged = (cl.site_length % 2) != 0;
            // charged-site parities stagger: odd sites carry -1, even +1;
            // a charged cluster's net charge is its leftmost site's sign
            cl.net_charge = cl.charged ? ((cl.left_site % 2) ? -1 : +1) : 0;
            if (cl.k > 1) {
                VacuumRun run;
                run.start = prev_right + 1;
                run.length = cl.left_site - prev_right - 1;
                out.vacuum_runs.push_back(run);
            }
            prev_right = cl.right_site;
            out.clusters.push_back(cl);
        }
        i = j + 1;
    }
    out.n_clusters = static_cast<int>(out.clusters.size());
    return out;
}

SliomPattern sliom_pattern(const ClusterDecomposition& decomp, int k_max) {
    if (k_max < decomp.n_clusters)
        throw ConfigError("sliom_pattern: k_max smaller than the cluster count");
    SliomPattern q(static_cast<std::size_t>(k_max), 0);
    for (const Cluster& cl : decomp.clusters)
        q[static_cast<std::size_t>(cl.k - 1)] = cl.charged ? +1 : -1;
    return q;
}

SliomPattern sliom_pattern_of(BitConfig c, const ChainSpec& spec, int k_max) {
    if (k_max == 0) k_max = max_clusters(spec);
    return sliom_pattern(decompose(c, spec), k_max);
}

std::vector<std::int8_t> electric_strings(BitConfig c, const ChainSpec& spec) {
    const int n = spec.n_padded();
    std::vector<std::int8_t> bonds(static_cast<std::size_t>(n));
    for (int b = 1; b <= n; ++b) {
        bool r = atom_is_r(c, b, spec);
        bool odd = (b % 2) != 0;
        // odd bond: g -> right, r -> left; even bonds reversed
        bonds[static_cast<std::size_t>(b - 1)] = (r == odd) ? -1 : +1;
    }
    return bonds;
}

bool gauss_check(BitConfig c, const ChainSpec& spec) {
    if (!has_g_padding(c, spec)) return false;
    auto bonds = electric_strings(c, spec);
    // a right-pointing string is the lowered link state, so S^z(right) = -1/2
    auto sz = [&](int b) { return bonds[static_cast<std::size_t>(b - 1)] > 0 ? -0.5 : +0.5; };
    for (int j = 1; j <= spec.n_sites(); ++j) {
        double rho = sz(j) - sz(j + 1);  // site j sits between bonds j and j+1
        bool ok = (rho == 0.0) || (rho < 0.0 && (j % 2) != 0) || (rho > 0.0 && (j % 2) == 0);
        if (!ok) return false;
    }
    return true;
}

std::string pattern_to_string(const SliomPattern& p) {
    std::string s;
    for (std::int8_t q : p) {
        if (!s.empty()) s += ' ';
        s += (q > 0 ? "c" : (q < 0 ? "n" : "."));
    }
    return s;
}

}  // namespace fraglab
