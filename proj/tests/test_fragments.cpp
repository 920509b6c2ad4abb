#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "fraglab/basis.hpp"
#include "fraglab/bigcomb.hpp"
#include "fraglab/fragments.hpp"
#include "fraglab/hamiltonians.hpp"
#include "fraglab/lgtmap.hpp"
#include "fraglab/types.hpp"

using namespace fraglab;

TEST_CASE("binomials and Fibonacci numbers are exact") {
    CHECK(binomial(0, 0) == 1);
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(60, 30) == BigInt("118264581564861424"));
    CHECK(binomial(5, 7) == 0);
    CHECK(fibonacci_big(1) == 1);
    CHECK(fibonacci_big(2) == 1);
    CHECK(fibonacci_big(18) == 2584);
    CHECK(fibonacci_big(100) == BigInt("354224848179261915075"));
    CHECK_THROWS_AS(fibonacci_big(0), ConfigError);
}

TEST_CASE("graph walk and hop rule give the same partition") {
    for (int na : {6, 10, 12}) {
        ChainSpec spec(na);
        BlockadedBasis basis(spec);
        const SparseOperator h = build_h_lgt(basis, 1.0);
        const FragmentTable from_h = find_fragments(basis, h);
        const FragmentTable from_rule = find_fragments(basis);
        REQUIRE(from_h.fragments.size() == from_rule.fragments.size());
        CHECK(from_h.fragments == from_rule.fragments);
        CHECK(from_h.fragment_of == from_rule.fragment_of);
    }
}

TEST_CASE("fragments carry one pattern each and patterns identify fragments") {
    for (int na : {8, 11, 14}) {
        ChainSpec spec(na);
        BlockadedBasis basis(spec);
        const FragmentTable table = find_fragments(basis);
        std::map<SliomPattern, std::size_t> seen;
        for (std::size_t f = 0; f < table.fragments.size(); ++f) {
            for (std::uint32_t m : table.fragments[f])
                CHECK(sliom_pattern_of(basis.state(m), spec) == table.pattern_of[f]);
            CHECK(!seen.count(table.pattern_of[f]));
            seen[table.pattern_of[f]] = f;
        }
        CHECK(seen.size() == table.fragments.size());
    }
}

TEST_CASE("member lists are sorted, disjoint, and cover the basis") {
    ChainSpec spec(13);
    BlockadedBasis basis(spec);
    const FragmentTable table = find_fragments(basis);
    std::size_t total = 0;
    std::set<std::uint32_t> all;
    for (std::size_t f = 0; f < table.fragments.size(); ++f) {
        const auto& mem = table.fragments[f];
        CHECK(std::is_sorted(mem.begin(), mem.end()));
        total += mem.size();
        for (std::uint32_t m : mem) {
            all.insert(m);
            CHECK(table.fragment_of[m] == f);
        }
        CHECK(table.sector_of[f] ==
              decompose(basis.state(mem.front()), spec).n_clusters);
    }
    CHECK(total == basis.size());
    CHECK(all.size() == basis.size());
    // ids are ordered by smallest member
    for (std::size_t f = 1; f < table.fragments.size(); ++f)
        CHECK(table.fragments[f - 1].front() < table.fragments[f].front());
}

TEST_CASE("closed-form fragment dimensions match the live sizes") {
    for (int na : {7, 10, 13}) {
        ChainSpec spec(na);
        BlockadedBasis basis(spec);
        const FragmentTable table = find_fragments(basis);
        for (std::size_t f = 0; f < table.fragments.size(); ++f) {
            int nq = 0, n0 = 0;
            for (int8_t q : table.pattern_of[f]) {
                if (q == 1) ++nq;
                if (q == -1) ++n0;
            }
            CHECK(fragment_dim(na, nq, n0) == table.fragments[f].size());
        }
    }
}

TEST_CASE("reference dimensions of the five-cluster families") {
    CHECK(fragment_dim(16, 5, 0) == 165);
    CHECK(fragment_dim(16, 3, 2) == 45);
    CHECK(fragment_dim(16, 1, 4) == 9);
    CHECK(fragment_dim(16, 7, 0) == 1);                      // the saturated frozen family
    CHECK_THROWS_AS(fragment_dim(16, 2, 2), ConfigError);   // parity violation
    CHECK_THROWS_AS(fragment_dim(16, 9, 0), ConfigError);   // too many clusters
}

TEST_CASE("census totals reproduce the basis size and live counts") {
    for (int na = 1; na <= 24; ++na) {
        const SectorCensus census = build_census(na);
        BigInt total = 0, nk = 0, frozen = 0;
        for (const CensusRow& r : census.rows) {
            total += r.dim * r.multiplicity;
            nk += r.multiplicity;
            if (r.dim == 1) frozen += r.multiplicity;
        }
        CHECK(total == census.d_total);
        CHECK(nk == census.n_krylov);
        CHECK(frozen == census.frozen_count);
        CHECK(census.d_total == fibonacci_big(na + 2));
        CHECK(count_krylov(na) == census.n_krylov);
        CHECK(total_dim(na) == census.d_total);
    }
    for (int na : {6, 9, 12, 14}) {
        BlockadedBasis basis{ChainSpec(na)};
        const FragmentTable table = find_fragments(basis);
        CHECK(BigInt(table.fragments.size()) == count_krylov(na));
        BigInt dmax = 0;
        for (const auto& f : table.fragments)
            dmax = std::max(dmax, BigInt(f.size()));
        CHECK(dmax == build_census(na).d_max);
    }
}

TEST_CASE("sector bookkeeping") {
    ChainSpec spec(16);
    BlockadedBasis basis(spec);
    const FragmentTable table = find_fragments(basis);
    std::map<int, int> live_count;
    std::map<int, BigInt> live_dim;
    for (std::size_t f = 0; f < table.fragments.size(); ++f) {
        live_count[table.sector_of[f]] += 1;
        live_dim[table.sector_of[f]] += table.fragments[f].size();
    }
    CHECK(live_count[5] == 16);
    CHECK(sector_fragment_count(5) == 16);
    CHECK(sector_fragment_count(1) == 1);
    for (const auto& [nc, d] : live_dim) CHECK(sector_dim(16, nc) == d);
    // the estimate never coincides with the argmax on large chains
    const LargestSector ls16 = largest_sector(16);
    CHECK(ls16.exact == 4);
    CHECK(ls16.estimate == 3);
    CHECK(largest_sector(50).exact == 10);
    CHECK(largest_sector(100).exact == 18);
    CHECK(largest_sector(150).exact == 27);
    CHECK(largest_sector(200).exact == 35);
    for (int na = 50; na <= 200; na += 10)
        CHECK(largest_sector(na).exact != largest_sector(na).estimate);
}

TEST_CASE("frozen fraction reference values") {
    CHECK(frozen_fraction(16).value() == doctest::Approx(0.3793103448).epsilon(1e-9));
    CHECK(frozen_fraction(20).value() == doctest::Approx(0.34375).epsilon(1e-9));
    CHECK(frozen_fraction(30).value() == doctest::Approx(0.3340358272).epsilon(1e-9));
    CHECK(frozen_fraction(40).value() == doctest::Approx(0.3301778543).epsilon(1e-9));
}

TEST_CASE("frozen fragments are exactly the single-charge-choice families") {
    // dimension-1 fragments have either no room to move or a saturated chain
    ChainSpec spec(12);
    BlockadedBasis basis(spec);
    const FragmentTable table = find_fragments(basis);
    const SparseOperator h = build_h_lgt(basis, 1.0);
    std::size_t frozen = 0;
    for (const auto& mem : table.fragments) {
        if (mem.size() != 1) continue;
        ++frozen;
        // a frozen state is annihilated up to its diagonal
        const std::size_t a = mem.front();
        for (std::size_t p = h.row_ptr()[a]; p < h.row_ptr()[a + 1]; ++p)
            CHECK(h.col()[p] == a);
    }
    CHECK(BigInt(frozen) == build_census(12).frozen_count);
}

TEST_CASE("big rational arithmetic") {
    const BigRational f = frozen_fraction(16);
    CHECK(f.num == 22);
    CHECK(f.den == 58);
    CHECK(f.value() == doctest::Approx(22.0 / 58.0).epsilon(1e-15));
}
