#include "fraglab/fragments.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace fraglab {

namespace {

constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();

FragmentTable bfs_partition(const BlockadedBasis& basis,
                            const std::function<void(std::uint32_t, std::vector<std::uint32_t>&)>&
                                neighbors_of) {
    const std::size_t dim = basis.size();
    FragmentTable table;
    table.fragment_of.assign(dim, kUnassigned);
    std::vector<std::uint32_t> stack, scratch;
    for (std::size_t s = 0; s < dim; ++s) {
        if (table.fragment_of[s] != kUnassigned) continue;
        const auto id = static_cast<std::uint32_t>(table.fragments.size());
        std::vector<std::uint32_t> members;
        stack.assign(1, static_cast<std::uint32_t>(s));
        table.fragment_of[s] = id;
        while (!stack.empty()) {
            const std::uint32_t cur = stack.back();
            stack.pop_back();
            members.push_back(cur);
            scratch.clear();
            neighbors_of(cur, scratch);
            for (std::uint32_t nb : scratch) {
                if (table.fragment_of[nb] != kUnassigned) continue;
                table.fragment_of[nb] = id;
                stack.push_back(nb);
            }
        }
        std::sort(members.begin(), members.end());
        auto decomp = decompose(basis.state(members.front()), basis.spec());
        table.sector_of.push_back(decomp.n_clusters);
        table.pattern_of.push_back(sliom_pattern(decomp, max_clusters(basis.spec())));
        table.fragments.push_back(std::move(members));
    }
    return table;
}

}  // namespace

FragmentTable find_fragments(const BlockadedBasis& basis, const SparseOperator& h_lgt) {
    if (h_lgt.dim() != basis.size())
        throw ConfigError("find_fragments: operator dimension does not match the basis");
    const auto& rp = h_lgt.row_ptr();
    const auto& col = h_lgt.col();
    return bfs_partition(basis, [&](std::uint32_t s, std::vector<std::uint32_t>& out) {
        for (std::size_t p = rp[s]; p < rp[s + 1]; ++p)
            if (col[p] != s) out.push_back(col[p]);
    });
}

FragmentTable find_fragments(const BlockadedBasis& basis) {
    const ChainSpec& spec = basis.spec();
    const int np = spec.n_padded();
    return bfs_partition(basis, [&](std::uint32_t s, std::vector<std::uint32_t>& out) {
        const BitConfig c = basis.state(s);
        for (int i = 3; i <= np - 2; ++i) {
            if (atom_is_r(c, i - 1, spec) || atom_is_r(c, i + 1, spec)) continue;
            if (atom_is_r(c, i - 2, spec) == atom_is_r(c, i + 2, spec)) continue;
            out.push_back(static_cast<std::uint32_t>(basis.index_of(flip_atom(c, i, spec))));
        }
    });
}

BigInt fragment_dim(int n_a, int n_q, int n_0) {
    if (n_a < 1 || n_q < 0 || n_0 < 0) throw ConfigError("fragment_dim: negative arguments");
    const int top2 = n_a + n_q + 1;
    const int k2 = n_a + 5 - 3 * n_q - 4 * n_0;
    if (top2 % 2 != 0) throw ConfigError("fragment_dim: charged-cluster parity inadmissible");
    if (k2 < 0 || k2 % 2 != 0) throw ConfigError("fragment_dim: cluster content exceeds the chain");
    return binomial(top2 / 2, k2 / 2);
}

SectorCensus build_census(int n_a) {
    if (n_a < 1) throw ConfigError("build_census: n_a must be >= 1");
    SectorCensus census;
    census.n_a = n_a;
    census.n_krylov = 0;
    census.d_total = 0;
    census.d_max = 0;
    census.frozen_count = 0;
    for (int nq = 0; 3 * nq <= n_a + 5; ++nq) {
        if ((n_a + nq + 1) % 2 != 0) continue;  // charged count fixed mod 2 by the site parity
        for (int n0 = 0; 3 * nq + 4 * n0 <= n_a + 5; ++n0) {
            if (nq + n0 == 0) continue;
            const int k2 = n_a + 5 - 3 * nq - 4 * n0;
            if (k2 % 2 != 0) continue;
            CensusRow row;
            row.n_q = nq;
            row.n_0 = n0;
            row.n_c = nq + n0;
            row.inflated_pairs = k2 / 2;
            row.dim = binomial((n_a + nq + 1) / 2, k2 / 2);
            row.multiplicity = binomial(nq + n0, nq);
            census.n_krylov += row.multiplicity;
            census.d_total += row.dim * row.multiplicity;
            if (row.dim > census.d_max) census.d_max = row.dim;
            if (row.dim == 1) census.frozen_count += row.multiplicity;
            census.rows.push_back(std::move(row));
        }
    }
    return census;
}

BigInt count_krylov(int n_a) { return build_census(n_a).n_krylov; }

BigInt total_dim(int n_a) { return build_census(n_a).d_total; }

double BigRational::value() const { return big_to_double(num) / big_to_double(den); }

BigRational frozen_fraction(int n_a) {
    SectorCensus census = build_census(n_a);
    return BigRational{census.frozen_count, census.n_krylov};
}

BigInt sector_fragment_count(int n_c) {
    if (n_c < 1) throw ConfigError("sector_fragment_count: n_c must be >= 1");
    return BigInt(1) << (n_c - 1);
}

BigInt sector_dim(int n_a, int n_c) {
    BigInt out = 0;
    for (const CensusRow& row : build_census(n_a).rows)
        if (row.n_c == n_c) out += row.dim * row.multiplicity;
    return out;
}

LargestSector largest_sector(int n_a) {
    SectorCensus census = build_census(n_a);
    std::vector<BigInt> per_sector(static_cast<std::size_t>((n_a + 5) / 3) + 1, BigInt(0));
    for (const CensusRow& row : census.rows)
        per_sector[static_cast<std::size_t>(row.n_c)] += row.dim * row.multiplicity;
    LargestSector out;
    out.estimate = (n_a + 3) / 6;
    out.dim = -1;
    for (std::size_t nc = 1; nc < per_sector.size(); ++nc) {
        if (per_sector[nc] > out.dim) {
            out.dim = per_sector[nc];
            out.exact = static_cast<int>(nc);
        }
    }
    return out;
}

}  // namespace fraglab
