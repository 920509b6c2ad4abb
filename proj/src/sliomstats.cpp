#include "fraglab/sliomstats.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "fraglab/fragments.hpp"
#include "fraglab/lgtmap.hpp"
#include "fraglab/threading.hpp"

namespace fraglab {

namespace {

constexpr double kFwhmOfSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

// P(t) = (t^3 + t^4) / (1 - t^2)^2: one block of minimal span 3 (odd) or 4
// (even) inflated by any even amount, followed by an even vacuum slot
template <typename Scalar>
std::vector<Scalar> block_poly(int n_max) {
    std::vector<Scalar> p(static_cast<std::size_t>(n_max) + 1, Scalar(0));
    for (int m = 0; 3 + 2 * m <= n_max; ++m) p[static_cast<std::size_t>(3 + 2 * m)] += m + 1;
    for (int m = 0; 4 + 2 * m <= n_max; ++m) p[static_cast<std::size_t>(4 + 2 * m)] += m + 1;
    return p;
}

template <typename Scalar>
std::vector<Scalar> conv_truncated(const std::vector<Scalar>& a, const std::vector<Scalar>& b,
                                   int n_max) {
    std::vector<Scalar> out(static_cast<std::size_t>(n_max) + 1, Scalar(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == Scalar(0)) continue;
        const std::size_t j_end = std::min(b.size(), static_cast<std::size_t>(n_max) + 1 - i);
        for (std::size_t j = 0; j < j_end; ++j) {
            if (b[j] == Scalar(0)) continue;
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

template <typename Tables>
Tables build_tables(int n_sites, int j_max) {
    if (n_sites < 1 || j_max < 0) throw ConfigError("lam tables: bad arguments");
    Tables t;
    t.n_sites = n_sites;
    using Scalar = std::remove_reference_t<decltype(t.f[0])>;
    const auto p = block_poly<Scalar>(n_sites);
    t.lam.resize(static_cast<std::size_t>(j_max) + 1);
    t.lam[0].assign(static_cast<std::size_t>(n_sites) + 1, Scalar(0));
    t.lam[0][0] = Scalar(1);
    for (int j = 1; j <= j_max; ++j)
        t.lam[static_cast<std::size_t>(j)] =
            conv_truncated(t.lam[static_cast<std::size_t>(j - 1)], p, n_sites);
    t.f.assign(static_cast<std::size_t>(n_sites) + 1, Scalar(0));
    for (const auto& row : t.lam)
        for (std::size_t n = 0; n < row.size(); ++n) t.f[n] += row[n];
    return t;
}

// shared kernel: counts[d] = sum over block spans ell of left[n_L] * right[n_R]
template <typename Scalar, typename Sink>
void qk_kernel(int n_sites, const std::vector<Scalar>& left, const std::vector<Scalar>& right,
               Sink&& sink) {
    const int s2 = 2 * n_sites;
    for (int d = 2; d <= s2; ++d) {
        const int l_max = std::min(d - 1, s2 - d + 1);
        Scalar tot(0);
        for (int ell = (d % 2 == 0) ? 1 : 2; ell <= l_max; ell += 2) {
            const int n_l = (d - ell - 1) / 2;
            const int n_r = n_sites - (d + ell - 1) / 2;
            if (n_l < 0 || n_r < 0) continue;
            const Scalar& lv = left[static_cast<std::size_t>(n_l)];
            if (lv == Scalar(0)) continue;
            tot += lv * right[static_cast<std::size_t>(n_r)];
        }
        if (tot != Scalar(0)) sink(d, tot);
    }
}

int default_j_max(int n_sites) { return (n_sites + 2) / 3; }

SliomDistribution distribution_from_counts(int k, const std::vector<double>& counts) {
    SliomDistribution dist;
    dist.k = k;
    for (std::size_t d = 0; d < counts.size(); ++d) {
        if (counts[d] == 0.0) continue;
        dist.weights[static_cast<int>(d)] = counts[d];
        dist.normalization += counts[d];
    }
    return dist;
}

// interpolated half-maximum crossing for sublattices too small to fit
double discrete_fwhm(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (ys[i] > ys[peak]) peak = i;
    const double half = ys[peak] / 2.0;
    double xl = xs.front();
    for (std::size_t i = peak; i-- > 0;) {
        if (ys[i] < half) {
            xl = xs[i] + (half - ys[i]) / (ys[i + 1] - ys[i]) * (xs[i + 1] - xs[i]);
            break;
        }
    }
    double xr = xs.back();
    for (std::size_t i = peak + 1; i < n; ++i) {
        if (ys[i] < half) {
            xr = xs[i] - (half - ys[i]) / (ys[i - 1] - ys[i]) * (xs[i] - xs[i - 1]);
            break;
        }
    }
    return xr - xl;
}

struct CenterChoice {
    int sector = 0;
    int k_center = 0;
};

CenterChoice center_choice(int n_a) {
    const LargestSector ls = largest_sector(n_a);
    CenterChoice c;
    c.sector = ls.exact;
    c.k_center = ls.exact / 2 + 1;
    return c;
}

std::vector<double> center_counts(int n_a, const LamTablesF& t, const CenterChoice& c) {
    return qk_counts_f(t, c.k_center,
                       t.lam[static_cast<std::size_t>(c.sector - c.k_center)]);
}

}  // namespace

LamTables build_lam_tables(int n_sites, int j_max) {
    return build_tables<LamTables>(n_sites, j_max);
}

LamTablesF build_lam_tables_f(int n_sites, int j_max) {
    return build_tables<LamTablesF>(n_sites, j_max);
}

std::map<int, BigInt> analytic_qk_counts(int n_a, int k, const LamTables& t) {
    if (k < 1) throw ConfigError("analytic_qk_counts: k must be >= 1");
    std::map<int, BigInt> out;
    if (static_cast<std::size_t>(k - 1) >= t.lam.size()) return out;
    qk_kernel<BigInt>(t.n_sites, t.lam[static_cast<std::size_t>(k - 1)], t.f,
                      [&](int d, const BigInt& v) { out[d] = v; });
    return out;
}

std::map<int, BigInt> analytic_qk_sector_counts(int n_a, int n_c, int k, const LamTables& t) {
    if (k < 1 || n_c < k) throw ConfigError("analytic_qk_sector_counts: need 1 <= k <= n_c");
    std::map<int, BigInt> out;
    if (static_cast<std::size_t>(k - 1) >= t.lam.size() ||
        static_cast<std::size_t>(n_c - k) >= t.lam.size())
        return out;
    qk_kernel<BigInt>(t.n_sites, t.lam[static_cast<std::size_t>(k - 1)],
                      t.lam[static_cast<std::size_t>(n_c - k)],
                      [&](int d, const BigInt& v) { out[d] = v; });
    return out;
}

std::vector<double> qk_counts_f(const LamTablesF& t, int k,
                                const std::vector<double>& right_table) {
    if (k < 1) throw ConfigError("qk_counts_f: k must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(2 * t.n_sites) + 1, 0.0);
    if (static_cast<std::size_t>(k - 1) >= t.lam.size()) return out;
    qk_kernel<double>(t.n_sites, t.lam[static_cast<std::size_t>(k - 1)], right_table,
                      [&](int d, double v) { out[static_cast<std::size_t>(d)] = v; });
    return out;
}

BigRational analytic_qk(int n_a, int k, int x2) {
    const ChainSpec spec(n_a);
    const int s = spec.n_sites();
    const LamTables t = build_lam_tables(s, default_j_max(s));
    const auto counts = analytic_qk_counts(n_a, k, t);
    const auto it = counts.find(x2);
    return BigRational{it == counts.end() ? BigInt(0) : it->second, fibonacci_big(n_a + 2)};
}

BigRational analytic_q1(int n_a, int x2) { return analytic_qk(n_a, 1, x2); }

std::vector<ExactDistribution> analytic_distributions(int n_a, int sector) {
    const ChainSpec spec(n_a);
    const int s = spec.n_sites();
    const int j_max = default_j_max(s);
    const LamTables t = build_lam_tables(s, j_max);
    const int k_top = (sector > 0) ? sector : j_max;
    const BigInt den = (sector > 0) ? sector_dim(n_a, sector) : fibonacci_big(n_a + 2);
    std::vector<ExactDistribution> out;
    for (int k = 1; k <= k_top; ++k) {
        ExactDistribution dist;
        dist.k = k;
        dist.denominator = den;
        dist.counts = (sector > 0) ? analytic_qk_sector_counts(n_a, sector, k, t)
                                   : analytic_qk_counts(n_a, k, t);
        out.push_back(std::move(dist));
    }
    return out;
}

std::vector<ExactDistribution> brute_force_distributions(int n_a, int sector) {
    const ChainSpec spec(n_a);
    const BlockadedBasis basis(spec);
    const int k_top = (sector > 0) ? sector : default_j_max(spec.n_sites());
    std::vector<ExactDistribution> out;
    for (int k = 1; k <= k_top; ++k) {
        ExactDistribution d;
        d.k = k;
        out.push_back(std::move(d));
    }
    BigInt den = 0;
    for (std::size_t s = 0; s < basis.size(); ++s) {
        const auto decomp = decompose(basis.state(s), spec);
        if (sector > 0 && decomp.n_clusters != sector) continue;
        den += 1;
        for (const Cluster& cl : decomp.clusters) {
            if (cl.k > k_top) break;
            out[static_cast<std::size_t>(cl.k - 1)].counts[cl.doubled_center] += 1;
        }
    }
    for (auto& d : out) d.denominator = den;
    return out;
}

WidthFit fwhm(const SliomDistribution& dist) {
    if (dist.weights.empty()) throw ConfigError("fwhm: empty distribution");
    WidthFit out;
    double num = 0.0, den = 0.0;
    for (int parity = 0; parity < 2; ++parity) {
        std::vector<double> xs, ys;
        for (const auto& [d, w] : dist.weights) {
            if ((d % 2 + 2) % 2 != parity || w == 0.0) continue;
            xs.push_back(d / 2.0);
            ys.push_back(w);
        }
        if (xs.empty()) continue;
        SublatticeFit fit;
        fit.parity = parity;
        fit.n_points = static_cast<int>(xs.size());
        fit.weight = 0.0;
        for (double y : ys) fit.weight += y;
        if (xs.size() < 4) {
            fit.fwhm = (xs.size() == 1) ? 0.0 : discrete_fwhm(xs, ys);
            fit.fitted = false;
        } else {
            const GaussParams g = gauss_fit(xs, ys);
            fit.amplitude = g.amplitude;
            fit.center = g.center;
            fit.sigma0 = g.sigma;
            fit.fwhm = kFwhmOfSigma * g.sigma;
            fit.residual = g.cost;
            fit.fitted = true;
        }
        num += fit.fwhm * fit.weight;
        den += fit.weight;
        out.residual += fit.residual;
        out.sublattices.push_back(fit);
    }
    if (den <= 0.0) throw ConfigError("fwhm: distribution has no weight");
    out.fwhm = num / den;
    out.degenerate = (out.fwhm == 0.0);
    return out;
}

ScalingResult scaling_exponent(const std::vector<int>& n_list, ScalingWhich which) {
    if (n_list.size() < 3) throw ConfigError("scaling_exponent: need at least 3 sizes");
    ScalingResult res;
    res.which = which;
    res.n_values.resize(n_list.size());
    res.sigma_over_n.resize(n_list.size());
    parallel_for(n_list.size(), [&](std::size_t slot) {
        const int n_a = n_list[slot];
        const int s = n_a + 3;
        const int j_top = default_j_max(s);
        const LamTablesF t = build_lam_tables_f(s, j_top + 1);
        double width = 0.0;
        switch (which) {
            case ScalingWhich::Boundary: {
                const auto q = qk_counts_f(t, 1, t.f);
                width = fwhm(distribution_from_counts(1, q)).fwhm;
                break;
            }
            case ScalingWhich::Bulk: {
                // bulk = every cluster except each state's leftmost (k >= 2)
                // and rightmost (right side keeps at least one block)
                std::vector<double> f_pos = t.f;
                f_pos[0] = 0.0;
                double num = 0.0, den = 0.0;
                for (int k = 2; k <= j_top; ++k) {
                    const auto q = qk_counts_f(t, k, f_pos);
                    const auto dist = distribution_from_counts(k, q);
                    if (dist.normalization <= 0.0) continue;
                    num += dist.normalization * fwhm(dist).fwhm;
                    den += dist.normalization;
                }
                width = num / den;
                break;
            }
            case ScalingWhich::Center: {
                const CenterChoice c = center_choice(n_a);
                const auto q = center_counts(n_a, t, c);
                width = fwhm(distribution_from_counts(c.k_center, q)).fwhm;
                break;
            }
        }
        res.n_values[slot] = static_cast<double>(n_a);
        res.sigma_over_n[slot] = width / static_cast<double>(n_a);
    });
    const LogLogFit fit = fit_alpha(res.n_values, res.sigma_over_n);
    res.alpha = fit.alpha;
    res.alpha_stderr = fit.stderr_;
    return res;
}

double collapse_sup_distance(const CollapseCurve& a, const CollapseCurve& b) {
    if (a.u.empty() || b.u.empty()) throw ConfigError("collapse_sup_distance: empty curve");
    const double lo = std::max(a.u.front(), b.u.front());
    const double hi = std::min(a.u.back(), b.u.back());
    if (hi <= lo) return 0.0;
    auto interp = [](const CollapseCurve& c, double x) {
        const auto it = std::lower_bound(c.u.begin(), c.u.end(), x);
        if (it == c.u.begin()) return c.h.front();
        if (it == c.u.end()) return c.h.back();
        const std::size_t j = static_cast<std::size_t>(it - c.u.begin());
        const double t = (x - c.u[j - 1]) / (c.u[j] - c.u[j - 1]);
        return c.h[j - 1] + t * (c.h[j] - c.h[j - 1]);
    };
    double sup = 0.0;
    constexpr int kGrid = 801;
    for (int g = 0; g < kGrid; ++g) {
        const double x = lo + (hi - lo) * g / (kGrid - 1);
        sup = std::max(sup, std::abs(interp(a, x) - interp(b, x)));
    }
    return sup;
}

CollapseResult scaling_collapse(const std::vector<int>& n_list) {
    if (n_list.size() < 2) throw ConfigError("scaling_collapse: need at least 2 sizes");
    CollapseResult res;
    res.even.resize(n_list.size());
    res.odd.resize(n_list.size());
    parallel_for(n_list.size(), [&](std::size_t slot) {
        const int n_a = n_list[slot];
        const int s = n_a + 3;
        const LamTablesF t = build_lam_tables_f(s, default_j_max(s) + 1);
        const CenterChoice c = center_choice(n_a);
        auto q = center_counts(n_a, t, c);
        double total = 0.0;
        for (double v : q) total += v;
        const double center_site = (1.0 + s) / 2.0;
        const double root = std::sqrt(static_cast<double>(n_a));
        for (int parity = 0; parity < 2; ++parity) {
            CollapseCurve& curve = (parity == 0) ? res.even[slot] : res.odd[slot];
            curve.n_a = n_a;
            for (std::size_t d = 0; d < q.size(); ++d) {
                if (q[d] == 0.0 || static_cast<int>(d % 2) != parity) continue;
                curve.u.push_back((d / 2.0 - center_site) / root);
                curve.h.push_back(q[d] / total * root);
            }
        }
    });
    for (int parity = 0; parity < 2; ++parity) {
        const auto& curves = (parity == 0) ? res.even : res.odd;
        double worst = 0.0;
        for (std::size_t i = 0; i < curves.size(); ++i)
            for (std::size_t j = i + 1; j < curves.size(); ++j)
                worst = std::max(worst, collapse_sup_distance(curves[i], curves[j]));
        (parity == 0 ? res.max_sup_even : res.max_sup_odd) = worst;
    }
    return res;
}

PeakRatioResult peak_ratio(int n_a) {
    const int s = n_a + 3;
    const LamTablesF t = build_lam_tables_f(s, default_j_max(s) + 1);
    const CenterChoice c = center_choice(n_a);
    const auto q = center_counts(n_a, t, c);
    double even_peak = 0.0, odd_peak = 0.0;
    for (std::size_t d = 0; d < q.size(); ++d) {
        if (d % 2 == 0)
            even_peak = std::max(even_peak, q[d]);
        else
            odd_peak = std::max(odd_peak, q[d]);
    }
    if (odd_peak <= 0.0) throw ConfigError("peak_ratio: neutral sublattice has no weight");
    PeakRatioResult out;
    out.ratio = even_peak / odd_peak;
    out.sector = c.sector;
    out.k_center = c.k_center;
    out.dim_ratio = big_to_double(fibonacci_big(n_a + 3)) / big_to_double(fibonacci_big(n_a + 2));
    return out;
}

}  // namespace fraglab
