#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "fraglab/sparse.hpp"
#include "fraglab/types.hpp"

namespace fraglab {

using StateVector = std::vector<std::complex<double>>;

enum class EvolveMethod { Auto, DenseSpectral, Iterative };

// exp(-i H t) |psi0> sampled on a time grid. `initial` is any unit-norm
// vector; product-state starts are the common case and come from
// unit_state(). Times must be nonnegative and strictly increasing.
struct EvolutionPlan {
    const SparseOperator* hamiltonian = nullptr;
    StateVector initial;
    std::vector<double> times;
    EvolveMethod method = EvolveMethod::Auto;
    double tolerance = 1e-10;   // per-run norm-error budget for the iterative path
    std::size_t dense_cap = 4096;  // largest dimension handled by full diagonalization
};

StateVector unit_state(std::size_t dim, std::size_t ordinal);

std::vector<StateVector> evolve(const EvolutionPlan& plan);

// Full-spectrum propagator, built once and reused across initial states and
// times. This is the oracle path for every dimension that fits.
class DensePropagator {
  public:
    explicit DensePropagator(const SparseOperator& h);
    ~DensePropagator();
    DensePropagator(DensePropagator&&) noexcept;
    DensePropagator& operator=(DensePropagator&&) noexcept;

    std::size_t dim() const;
    StateVector at(const StateVector& psi0, double t) const;
    const std::vector<double>& eigenvalues() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One Lanczos-propagated step chain; keeps no spectral data. Substep size is
// adapted until the a-posteriori error estimate meets the budget; throws
// ConvergenceError when it cannot.
class LanczosPropagator {
  public:
    LanczosPropagator(const SparseOperator& h, double tolerance, int krylov_dim = 40);

    // advances psi in place by dt >= 0
    void step(StateVector& psi, double dt) const;

  private:
    const SparseOperator* h_;
    double tolerance_;
    int krylov_dim_;
};

}  // namespace fraglab
