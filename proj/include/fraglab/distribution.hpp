#pragma once

#include <map>

#include "fraglab/bigcomb.hpp"

namespace fraglab {

// Spatial distribution of the k-th cluster center. Positions are doubled
// (integer 2x) so half-integer centers of neutral clusters stay exact; even
// doubled positions are the charged sublattice, odd the neutral one.
struct SliomDistribution {
    int k = 0;
    std::map<int, double> weights;
    double normalization = 0.0;  // total weight; 1 means already normalized
};

// Same thing with exact integer counts over an exact denominator.
struct ExactDistribution {
    int k = 0;
    std::map<int, BigInt> counts;
    BigInt denominator;

    SliomDistribution to_weights() const;
};

// 0.5 * sum |p - q| after normalizing each side by its own total.
double total_variation(const SliomDistribution& a, const SliomDistribution& b);

}  // namespace fraglab
