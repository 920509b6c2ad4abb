#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fraglab {

// Row-compressed real matrix. Every operator in this engine is real
// symmetric in the Z basis (all couplings are real), so values are doubles
// and "hermitian" reduces to symmetry.
class SparseOperator {
  public:
    SparseOperator() = default;

    std::size_t dim() const { return dim_; }
    std::size_t nnz() const { return val_.size(); }
    bool hermitian() const { return hermitian_; }

    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::uint32_t>& col() const { return col_; }
    const std::vector<double>& val() const { return val_; }

    // y = A x (complex vectors, real entries)
    void apply(const std::complex<double>* x, std::complex<double>* y) const;
    void apply(const std::vector<std::complex<double>>& x,
               std::vector<std::complex<double>>& y) const;

    double coeff(std::size_t r, std::size_t c) const;  // 0.0 when absent

    // max |A - A^T| over all entries
    double symmetry_residual() const;

    // Assembles from coordinate triplets; duplicate (row, col) pairs are
    // summed, entries below `drop_tol` in magnitude are dropped.
    static SparseOperator from_triplets(std::size_t dim,
                                        std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> triplets,
                                        double drop_tol = 0.0);

    static SparseOperator diagonal(const std::vector<double>& d);

    // A + alpha * B (same dim)
    SparseOperator plus(const SparseOperator& other, double alpha = 1.0) const;

    // [A, B] = AB - BA
    SparseOperator commutator(const SparseOperator& other) const;

    SparseOperator scaled(double alpha) const;

    double max_abs() const;
    double max_abs_diff(const SparseOperator& other) const;

    void set_hermitian_flag(bool h) { hermitian_ = h; }

  private:
    static SparseOperator multiply(const SparseOperator& a, const SparseOperator& b);

    std::size_t dim_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::uint32_t> col_;
    std::vector<double> val_;
    bool hermitian_ = false;
};

}  // namespace fraglab
