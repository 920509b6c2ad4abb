#include "fraglab/distribution.hpp"

#include <cmath>
#include <set>

#include "fraglab/types.hpp"

namespace fraglab {

SliomDistribution ExactDistribution::to_weights() const {
    SliomDistribution out;
    out.k = k;
    const double den = big_to_double(denominator);
    for (const auto& [pos, cnt] : counts) {
        const double w = big_to_double(cnt) / den;
        out.weights[pos] = w;
        out.normalization += w;
    }
    return out;
}

double total_variation(const SliomDistribution& a, const SliomDistribution& b) {
    if (a.normalization <= 0.0 || b.normalization <= 0.0)
        throw ConfigError("total_variation: empty distribution");
    std::set<int> support;
    for (const auto& [pos, w] : a.weights) support.insert(pos);
    for (const auto& [pos, w] : b.weights) support.insert(pos);
    double tv = 0.0;
    for (int pos : support) {
        const auto ia = a.weights.find(pos);
        const auto ib = b.weights.find(pos);
        const double pa = (ia == a.weights.end()) ? 0.0 : ia->second / a.normalization;
        const double pb = (ib == b.weights.end()) ? 0.0 : ib->second / b.normalization;
        tv += std::abs(pa - pb);
    }
    return 0.5 * tv;
}

}  // namespace fraglab
