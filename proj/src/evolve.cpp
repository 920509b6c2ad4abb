#include "fraglab/evolve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace fraglab {

namespace {

void validate(const EvolutionPlan& plan) {
    if (!plan.hamiltonian) throw ConfigError("evolve: missing Hamiltonian");
    const std::size_t dim = plan.hamiltonian->dim();
    if (plan.initial.size() != dim) throw ConfigError("evolve: initial vector has wrong size");
    double n2 = 0.0;
    for (const auto& a : plan.initial) n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > 1e-9) throw ConfigError("evolve: initial vector is not unit norm");
    double prev = -1.0;
    for (double t : plan.times) {
        if (t < 0.0 || t <= prev)
            throw ConfigError("evolve: times must be nonnegative and strictly increasing");
        prev = t;
    }
}

}  // namespace

StateVector unit_state(std::size_t dim, std::size_t ordinal) {
    if (ordinal >= dim) throw ConfigError("unit_state: ordinal out of range");
    StateVector v(dim, {0.0, 0.0});
    v[ordinal] = {1.0, 0.0};
    return v;
}

struct DensePropagator::Impl {
    Eigen::MatrixXd vecs;
    Eigen::VectorXd vals;
    std::vector<double> vals_copy;
};

DensePropagator::DensePropagator(const SparseOperator& h) : impl_(new Impl) {
    const auto dim = static_cast<Eigen::Index>(h.dim());
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(dim, dim);
    const auto& rp = h.row_ptr();
    const auto& col = h.col();
    const auto& val = h.val();
    for (std::size_t r = 0; r < h.dim(); ++r)
        for (std::size_t p = rp[r]; p < rp[r + 1]; ++p)
            dense(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col[p])) = val[p];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("DensePropagator: eigendecomposition failed");
    impl_->vecs = solver.eigenvectors();
    impl_->vals = solver.eigenvalues();
    impl_->vals_copy.assign(impl_->vals.data(), impl_->vals.data() + impl_->vals.size());
}

DensePropagator::~DensePropagator() = default;
DensePropagator::DensePropagator(DensePropagator&&) noexcept = default;
DensePropagator& DensePropagator::operator=(DensePropagator&&) noexcept = default;

std::size_t DensePropagator::dim() const { return static_cast<std::size_t>(impl_->vals.size()); }

const std::vector<double>& DensePropagator::eigenvalues() const { return impl_->vals_copy; }

StateVector DensePropagator::at(const StateVector& psi0, double t) const {
    const Eigen::Index dim = impl_->vals.size();
    if (psi0.size() != static_cast<std::size_t>(dim))
        throw ConfigError("DensePropagator: state size mismatch");
    Eigen::VectorXd re(dim), im(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        re(i) = psi0[static_cast<std::size_t>(i)].real();
        im(i) = psi0[static_cast<std::size_t>(i)].imag();
    }
    // spectral coefficients of psi0, then phases, then back to the Z basis;
    // all products stay real-real for speed
    Eigen::VectorXd cre = impl_->vecs.transpose() * re;
    Eigen::VectorXd cim = impl_->vecs.transpose() * im;
    Eigen::VectorXd pre(dim), pim(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double ph = -impl_->vals(i) * t;
        const double c = std::cos(ph), s = std::sin(ph);
        const double a = cre(i), b = cim(i);
        pre(i) = a * c - b * s;
        pim(i) = a * s + b * c;
    }
    Eigen::VectorXd ore = impl_->vecs * pre;
    Eigen::VectorXd oim = impl_->vecs * pim;
    StateVector out(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i)
        out[static_cast<std::size_t>(i)] = {ore(i), oim(i)};
    return out;
}

LanczosPropagator::LanczosPropagator(const SparseOperator& h, double tolerance, int krylov_dim)
    : h_(&h), tolerance_(tolerance), krylov_dim_(krylov_dim) {
    if (krylov_dim < 4) throw ConfigError("LanczosPropagator: krylov_dim too small");
}

void LanczosPropagator::step(StateVector& psi, double dt) const {
    if (dt == 0.0) return;
    if (dt < 0.0) throw ConfigError("LanczosPropagator: dt must be >= 0");
    const std::size_t dim = h_->dim();
    const int m_max = krylov_dim_;

    double remaining = dt;
    double h = dt;
    int guard = 0;
    while (remaining > 0.0) {
        if (++guard > 1000000) throw ConvergenceError("LanczosPropagator: step count exploded");
        const double step_dt = std::min(h, remaining);

        // Lanczos basis from the current state
        std::vector<StateVector> basis;
        basis.reserve(static_cast<std::size_t>(m_max));
        std::vector<double> alpha, beta;  // beta[j] links v_j and v_{j+1}
        basis.push_back(psi);
        StateVector w(dim);
        int m = 0;
        bool breakdown = false;
        for (int j = 0; j < m_max; ++j) {
            h_->apply(basis.back(), w);
            if (j > 0) {
                const double b = beta[static_cast<std::size_t>(j - 1)];
                const auto& prev = basis[static_cast<std::size_t>(j - 1)];
                for (std::size_t i = 0; i < dim; ++i) w[i] -= b * prev[i];
            }
            double a = 0.0;
            const auto& cur = basis.back();
            for (std::size_t i = 0; i < dim; ++i)
                a += (std::conj(cur[i]) * w[i]).real();
            alpha.push_back(a);
            m = j + 1;
            for (std::size_t i = 0; i < dim; ++i) w[i] -= a * cur[i];
            // one round of reorthogonalization keeps the basis clean enough
            for (const auto& v : basis) {
                std::complex<double> ov = 0.0;
                for (std::size_t i = 0; i < dim; ++i) ov += std::conj(v[i]) * w[i];
                for (std::size_t i = 0; i < dim; ++i) w[i] -= ov * v[i];
            }
            double b2 = 0.0;
            for (std::size_t i = 0; i < dim; ++i) b2 += std::norm(w[i]);
            const double b = std::sqrt(b2);
            if (b < 1e-14) {  // invariant subspace: exact within it
                breakdown = true;
                break;
            }
            if (j + 1 < m_max) {
                beta.push_back(b);
                StateVector next(dim);
                for (std::size_t i = 0; i < dim; ++i) next[i] = w[i] / b;
                basis.push_back(std::move(next));
            } else {
                beta.push_back(b);  // kept only for the error estimate
            }
        }

        // exp(-i T dt) e1 on the tridiagonal projection
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int j = 0; j < m; ++j) {
            T(j, j) = alpha[static_cast<std::size_t>(j)];
            if (j + 1 < m) {
                T(j, j + 1) = beta[static_cast<std::size_t>(j)];
                T(j + 1, j) = beta[static_cast<std::size_t>(j)];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        if (es.info() != Eigen::Success)
            throw ConvergenceError("LanczosPropagator: tridiagonal solve failed");
        Eigen::VectorXd e1coef = es.eigenvectors().row(0).transpose();
        Eigen::VectorXcd small(m);
        for (int j = 0; j < m; ++j) {
            const double ph = -es.eigenvalues()(j) * step_dt;
            small(j) = std::polar(1.0, ph) * e1coef(j);
        }
        Eigen::VectorXcd coef = es.eigenvectors() * small;

        const double err = breakdown
                               ? 0.0
                               : beta.back() * std::abs(coef(m - 1)) * step_dt;
        const double budget = tolerance_ * (step_dt / dt);
        if (!breakdown && err > budget && step_dt > 1e-9) {
            h = step_dt * 0.5;
            if (h < 1e-9)
                throw ConvergenceError("LanczosPropagator: substep underflow before tolerance");
            continue;
        }

        StateVector next(dim, {0.0, 0.0});
        for (int j = 0; j < m; ++j) {
            const std::complex<double> cj = coef(j);
            const auto& v = basis[static_cast<std::size_t>(j)];
            for (std::size_t i = 0; i < dim; ++i) next[i] += cj * v[i];
        }
        psi.swap(next);
        remaining -= step_dt;
        if (err < 0.1 * budget) h = std::min(step_dt * 2.0, dt);
    }
}

std::vector<StateVector> evolve(const EvolutionPlan& plan) {
    validate(plan);
    const SparseOperator& h = *plan.hamiltonian;
    const bool dense = plan.method == EvolveMethod::DenseSpectral ||
                       (plan.method == EvolveMethod::Auto && h.dim() <= plan.dense_cap);
    std::vector<StateVector> out;
    out.reserve(plan.times.size());
    if (dense) {
        DensePropagator prop(h);
        for (double t : plan.times) out.push_back(prop.at(plan.initial, t));
        return out;
    }
    LanczosPropagator prop(h, plan.tolerance);
    StateVector psi = plan.initial;
    double t_prev = 0.0;
    for (double t : plan.times) {
        prop.step(psi, t - t_prev);
        t_prev = t;
        out.push_back(psi);
    }
    return out;
}

}  // namespace fraglab
