#include "fraglab/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fraglab/types.hpp"

namespace fraglab {

namespace {

// solves M x = b for 3x3 via partial-pivot elimination; false when singular
bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> b,
            std::array<double, 3>& x) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (std::abs(m[piv][col]) < 1e-300) return false;
        std::swap(m[piv], m[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int r = 2; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < 3; ++c) s -= m[r][c] * x[c];
        x[r] = s / m[r][r];
    }
    return true;
}

}  // namespace

GaussParams gauss_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                      int max_iters) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw ConfigError("gauss_fit: need matching xs/ys with at least 3 points");
    const std::size_t n = xs.size();

    double ysum = 0.0, ymax = 0.0;
    for (double y : ys) {
        ysum += y;
        ymax = std::max(ymax, y);
    }
    if (ysum <= 0.0) throw ConfigError("gauss_fit: nonpositive weights");
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += ys[i] / ysum * xs[i];
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += ys[i] / ysum * (xs[i] - mu) * (xs[i] - mu);
    double a = ymax, s = std::sqrt(std::max(var, 1e-12));

    std::vector<double> resid(n), e(n);
    auto eval_resid = [&](double pa, double pmu, double ps, std::vector<double>& r) {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = xs[i] - pmu;
            r[i] = pa * std::exp(-z * z / (2.0 * ps * ps)) - ys[i];
            cost += r[i] * r[i];
        }
        return cost;
    };
    double cost = eval_resid(a, mu, s, resid);
    double damp = 1e-3;
    bool moved = false;

    for (int iter = 0; iter < max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            const double z = xs[i] - mu;
            e[i] = std::exp(-z * z / (2.0 * s * s));
        }
        std::array<std::array<double, 3>, 3> h{};
        std::array<double, 3> g{};
        for (std::size_t i = 0; i < n; ++i) {
            const double z = xs[i] - mu;
            const std::array<double, 3> j{e[i], a * e[i] * z / (s * s),
                                          a * e[i] * z * z / (s * s * s)};
            for (int r = 0; r < 3; ++r) {
                g[r] += j[r] * resid[i];
                for (int c = 0; c < 3; ++c) h[r][c] += j[r] * j[c];
            }
        }
        std::array<double, 3> dp{};
        bool accepted = false;
        for (int attempt = 0; attempt < 50; ++attempt) {
            auto hd = h;
            for (int r = 0; r < 3; ++r) hd[r][r] += damp * (h[r][r] + 1e-12);
            std::array<double, 3> rhs{-g[0], -g[1], -g[2]};
            if (!solve3(hd, rhs, dp)) {
                damp *= 10.0;
                continue;
            }
            const double na2 = a + dp[0], nmu = mu + dp[1], ns = s + dp[2];
            if (ns <= 0.0) {
                damp *= 10.0;
                continue;
            }
            std::vector<double> rn(n);
            const double cn = eval_resid(na2, nmu, ns, rn);
            if (cn < cost) {
                a = na2;
                mu = nmu;
                s = ns;
                resid.swap(rn);
                cost = cn;
                damp = std::max(damp / 3.0, 1e-12);
                accepted = true;
                moved = true;
                break;
            }
            damp *= 10.0;
        }
        if (!accepted) break;
        if (std::abs(dp[2]) < 1e-12 * std::max(1.0, std::abs(s))) break;
    }

    GaussParams out;
    out.amplitude = a;
    out.center = mu;
    out.sigma = std::abs(s);
    out.cost = cost;
    out.converged = moved || cost < 1e-20;
    return out;
}

LogLogFit fit_alpha(const std::vector<double>& ns, const std::vector<double>& ys) {
    if (ns.size() != ys.size() || ns.size() < 3)
        throw ConfigError("fit_alpha: need matching inputs with at least 3 points");
    const std::size_t n = ns.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (ns[i] <= 0.0 || ys[i] <= 0.0) throw ConfigError("fit_alpha: inputs must be positive");
        lx[i] = std::log(ns[i]);
        ly[i] = std::log(ys[i]);
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double det = n * sxx - sx * sx;
    if (det <= 0.0) throw ConfigError("fit_alpha: degenerate abscissae");
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy * sxx - sx * sxy) / det;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (slope * lx[i] + intercept);
        ss += r * r;
    }
    const double dof = std::max<double>(static_cast<double>(n) - 2.0, 1.0);
    LogLogFit out;
    out.alpha = -slope;
    out.stderr_ = std::sqrt(ss / dof * static_cast<double>(n) / det);
    out.intercept = intercept;
    return out;
}

}  // namespace fraglab
