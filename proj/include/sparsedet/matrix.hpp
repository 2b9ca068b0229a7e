#pragma once

// Dense row-major matrix and the small set of shared matrix utilities:
// the l-infinity (max absolute row sum) norm, conjugate-transpose products,
// column subsetting and matched-filter style matrix-vector products.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sparsedet/common.hpp"

namespace sparsedet {

template <typename Scalar>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, Scalar fill = Scalar{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar{1};
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Scalar& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Scalar& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<Scalar> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const Scalar> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const Scalar> data() const { return data_; }
    std::span<Scalar> data() { return data_; }

    std::vector<Scalar> column(std::size_t c) const {
        std::vector<Scalar> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
        return out;
    }

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Scalar> data_;
};

using RealMatrix = DenseMatrix<double>;
using ComplexMatrix = DenseMatrix<std::complex<double>>;

// max_p sum_q |A_pq|; |.| is the modulus for complex entries.
template <typename Scalar>
double linf_matrix_norm(const DenseMatrix<Scalar>& a) {
    if (a.empty()) throw domain_error("linf_matrix_norm: empty matrix");
    double best = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double s = 0.0;
        for (const Scalar& v : a.row(r)) s += scalar_abs(v);
        best = std::max(best, s);
    }
    return best;
}

// A^H B (plain transpose in the real field).
template <typename Scalar>
DenseMatrix<Scalar> gram(const DenseMatrix<Scalar>& a, const DenseMatrix<Scalar>& b) {
    if (a.rows() != b.rows()) throw domain_error("gram: row counts differ");
    DenseMatrix<Scalar> g(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.cols(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Scalar acc{};
            for (std::size_t r = 0; r < a.rows(); ++r) acc += scalar_conj(a(r, i)) * b(r, j);
            g(i, j) = acc;
        }
    }
    return g;
}

// Columns of A selected by S, in the order given.
template <typename Scalar>
DenseMatrix<Scalar> column_subset(const DenseMatrix<Scalar>& a, const std::vector<std::size_t>& s) {
    for (std::size_t idx : s) {
        if (idx >= a.cols()) throw domain_error("column_subset: index out of range");
    }
    DenseMatrix<Scalar> out(a.rows(), s.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
        for (std::size_t r = 0; r < a.rows(); ++r) out(r, j) = a(r, s[j]);
    }
    return out;
}

template <typename Scalar>
std::vector<Scalar> matvec(const DenseMatrix<Scalar>& a, const std::vector<Scalar>& x) {
    if (x.size() != a.cols()) throw domain_error("matvec: dimension mismatch");
    std::vector<Scalar> y(a.rows(), Scalar{});
    for (std::size_t r = 0; r < a.rows(); ++r) {
        Scalar acc{};
        auto row = a.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

// A^H y without forming the adjoint.
template <typename Scalar>
std::vector<Scalar> adjoint_matvec(const DenseMatrix<Scalar>& a, const std::vector<Scalar>& y) {
    if (y.size() != a.rows()) throw domain_error("adjoint_matvec: dimension mismatch");
    std::vector<Scalar> out(a.cols(), Scalar{});
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto row = a.row(r);
        const Scalar yr = y[r];
        for (std::size_t c = 0; c < row.size(); ++c) out[c] += scalar_conj(row[c]) * yr;
    }
    return out;
}

template <typename Scalar>
DenseMatrix<Scalar> adjoint(const DenseMatrix<Scalar>& a) {
    DenseMatrix<Scalar> out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = scalar_conj(a(r, c));
    return out;
}

template <typename Scalar>
double l2_norm(const std::vector<Scalar>& v) {
    double s = 0.0;
    for (const Scalar& x : v) {
        const double m = scalar_abs(x);
        s += m * m;
    }
    return std::sqrt(s);
}

template <typename Scalar>
double linf_norm(const std::vector<Scalar>& v) {
    double best = 0.0;
    for (const Scalar& x : v) best = std::max(best, static_cast<double>(scalar_abs(x)));
    return best;
}

// <u, v> with the first argument conjugated.
template <typename Scalar>
Scalar dot(const std::vector<Scalar>& u, const std::vector<Scalar>& v) {
    if (u.size() != v.size()) throw domain_error("dot: dimension mismatch");
    Scalar acc{};
    for (std::size_t i = 0; i < u.size(); ++i) acc += scalar_conj(u[i]) * v[i];
    return acc;
}

}  // namespace sparsedet
