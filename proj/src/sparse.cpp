#include "fraglab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace fraglab {

void SparseOperator::apply(const std::complex<double>* x, std::complex<double>* y) const {
    for (std::size_t r = 0; r < dim_; ++r) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
            acc += val_[p] * x[col_[p]];
        y[r] = acc;
    }
}

void SparseOperator::apply(const std::vector<std::complex<double>>& x,
                           std::vector<std::complex<double>>& y) const {
    y.resize(dim_);
    apply(x.data(), y.data());
}

double SparseOperator::coeff(std::size_t r, std::size_t c) const {
    const auto lo = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
    const auto hi = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
    auto it = std::lower_bound(lo, hi, static_cast<std::uint32_t>(c));
    if (it == hi || *it != c) return 0.0;
    return val_[static_cast<std::size_t>(it - col_.begin())];
}

double SparseOperator::symmetry_residual() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
            worst = std::max(worst, std::abs(val_[p] - coeff(col_[p], r)));
    return worst;
}

SparseOperator SparseOperator::from_triplets(
    std::size_t dim, std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> triplets,
    double drop_tol) {
    std::sort(triplets.begin(), triplets.end(),
              [](const auto& a, const auto& b) {
                  return std::tie(std::get<0>(a), std::get<1>(a)) <
                         std::tie(std::get<0>(b), std::get<1>(b));
              });
    SparseOperator op;
    op.dim_ = dim;
    op.row_ptr_.assign(dim + 1, 0);
    std::size_t i = 0;
    while (i < triplets.size()) {
        std::uint32_t r = std::get<0>(triplets[i]);
        std::uint32_t c = std::get<1>(triplets[i]);
        double v = std::get<2>(triplets[i]);
        std::size_t j = i + 1;
        while (j < triplets.size() && std::get<0>(triplets[j]) == r &&
               std::get<1>(triplets[j]) == c) {
            v += std::get<2>(triplets[j]);
            ++j;
        }
        if (std::abs(v) > drop_tol) {
            op.col_.push_back(c);
            op.val_.push_back(v);
            ++op.row_ptr_[r + 1];
        }
        i = j;
    }
    for (std::size_t r = 0; r < dim; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
    return op;
}

SparseOperator SparseOperator::diagonal(const std::vector<double>& d) {
    SparseOperator op;
    op.dim_ = d.size();
    op.row_ptr_.resize(d.size() + 1);
    op.col_.reserve(d.size());
    op.val_.reserve(d.size());
    op.row_ptr_[0] = 0;
    for (std::size_t r = 0; r < d.size(); ++r) {
        op.col_.push_back(static_cast<std::uint32_t>(r));
        op.val_.push_back(d[r]);
        op.row_ptr_[r + 1] = r + 1;
    }
    op.hermitian_ = true;
    return op;
}

SparseOperator SparseOperator::plus(const SparseOperator& other, double alpha) const {
    if (dim_ != other.dim_) throw std::invalid_argument("SparseOperator::plus: dim mismatch");
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> tr;
    tr.reserve(nnz() + other.nnz());
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
            tr.emplace_back(static_cast<std::uint32_t>(r), col_[p], val_[p]);
    for (std::size_t r = 0; r < other.dim_; ++r)
        for (std::size_t p = other.row_ptr_[r]; p < other.row_ptr_[r + 1]; ++p)
            tr.emplace_back(static_cast<std::uint32_t>(r), other.col_[p], alpha * other.val_[p]);
    return from_triplets(dim_, std::move(tr), 1e-15);
}

SparseOperator SparseOperator::multiply(const SparseOperator& a, const SparseOperator& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("SparseOperator::multiply: dim mismatch");
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> tr;
    for (std::size_t r = 0; r < a.dim_; ++r)
        for (std::size_t p = a.row_ptr_[r]; p < a.row_ptr_[r + 1]; ++p) {
            std::uint32_t m = a.col_[p];
            double av = a.val_[p];
            for (std::size_t q = b.row_ptr_[m]; q < b.row_ptr_[m + 1]; ++q)
                tr.emplace_back(static_cast<std::uint32_t>(r), b.col_[q], av * b.val_[q]);
        }
    return from_triplets(a.dim_, std::move(tr), 0.0);
}

SparseOperator SparseOperator::commutator(const SparseOperator& other) const {
    return multiply(*this, other).plus(multiply(other, *this), -1.0);
}

SparseOperator SparseOperator::scaled(double alpha) const {
    SparseOperator op = *this;
    for (double& v : op.val_) v *= alpha;
    return op;
}

double SparseOperator::max_abs() const {
    double m = 0.0;
    for (double v : val_) m = std::max(m, std::abs(v));
    return m;
}

double SparseOperator::max_abs_diff(const SparseOperator& other) const {
    return plus(other, -1.0).max_abs();
}

}  // namespace fraglab
