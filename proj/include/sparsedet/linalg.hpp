#pragma once

// Small dense factorizations used by the detection formulas and the solvers:
// Hermitian Cholesky (solve-based, no explicit inverses), partial-pivoting
// Gaussian elimination with singularity detection, cyclic-Jacobi eigenvalues
// and power iteration for the largest Gram eigenvalue.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "sparsedet/matrix.hpp"

namespace sparsedet {

// Lower-triangular L with G = L L^H; nullopt when a pivot is not positive.
template <typename Scalar>
std::optional<DenseMatrix<Scalar>> cholesky_factor(const DenseMatrix<Scalar>& g) {
    if (g.rows() != g.cols()) throw domain_error("cholesky_factor: matrix not square");
    const std::size_t n = g.rows();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, scalar_abs(g(i, i)));
    const double tol = scale * 1e-14;

    DenseMatrix<Scalar> l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = std::real(std::complex<double>(g(j, j)));
        for (std::size_t k = 0; k < j; ++k) {
            const double m = scalar_abs(l(j, k));
            diag -= m * m;
        }
        if (!(diag > tol)) return std::nullopt;
        const double ljj = std::sqrt(diag);
        l(j, j) = Scalar{ljj};
        for (std::size_t i = j + 1; i < n; ++i) {
            Scalar acc = g(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * scalar_conj(l(j, k));
            l(i, j) = acc / Scalar{ljj};
        }
    }
    return l;
}

template <typename Scalar>
std::vector<Scalar> cholesky_solve(const DenseMatrix<Scalar>& l, const std::vector<Scalar>& rhs) {
    const std::size_t n = l.rows();
    if (rhs.size() != n) throw domain_error("cholesky_solve: dimension mismatch");
    std::vector<Scalar> x(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
        Scalar acc = x[i];
        for (std::size_t k = 0; k < i; ++k) acc -= l(i, k) * x[k];
        x[i] = acc / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        Scalar acc = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) acc -= scalar_conj(l(k, ii)) * x[k];
        x[ii] = acc / l(ii, ii);
    }
    return x;
}

// General square solve; nullopt when the pivot falls below tol * scale.
template <typename Scalar>
std::optional<std::vector<Scalar>> gauss_solve(DenseMatrix<Scalar> a, std::vector<Scalar> b,
                                               double rel_pivot_tol = 1e-12) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw domain_error("gauss_solve: dimension mismatch");
    double scale = 0.0;
    for (const Scalar& v : a.data()) scale = std::max(scale, static_cast<double>(scalar_abs(v)));
    if (scale == 0.0) return std::nullopt;
    const double tol = scale * rel_pivot_tol;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (scalar_abs(a(r, col)) > scalar_abs(a(piv, col))) piv = r;
        }
        if (scalar_abs(a(piv, col)) <= tol) return std::nullopt;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const Scalar f = a(r, col) / a(col, col);
            if (f == Scalar{}) continue;
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<Scalar> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        Scalar acc = b[ii];
        for (std::size_t c = ii + 1; c < n; ++c) acc -= a(ii, c) * x[c];
        x[ii] = acc / a(ii, ii);
    }
    return x;
}

// Eigenvalues of a real symmetric matrix by cyclic Jacobi sweeps, ascending.
inline std::vector<double> symmetric_eigenvalues(RealMatrix s) {
    if (s.rows() != s.cols()) throw domain_error("symmetric_eigenvalues: matrix not square");
    const std::size_t n = s.rows();
    if (n == 0) return {};
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        double scale = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            scale = std::max(scale, std::abs(s(p, p)));
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(s(p, q)));
        }
        if (off <= std::max(scale, 1.0) * 1e-15) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (std::abs(apq) <= std::max(scale, 1.0) * 1e-18) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double skp = s(k, p);
                    const double skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double spk = s(p, k);
                    const double sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = s(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Hermitian H -> real symmetric [[Re H, -Im H], [Im H, Re H]], whose spectrum
// is that of H with every eigenvalue doubled in multiplicity.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
    const std::size_t n = h.rows();
    if (h.cols() != n) throw domain_error("hermitian_eigenvalues: matrix not square");
    RealMatrix s(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double re = h(i, j).real();
            const double im = h(i, j).imag();
            s(i, j) = re;
            s(i + n, j + n) = re;
            s(i, j + n) = -im;
            s(i + n, j) = im;
        }
    }
    std::vector<double> doubled = symmetric_eigenvalues(std::move(s));
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
    return ev;
}

inline std::vector<double> hermitian_eigenvalues(const RealMatrix& h) { return symmetric_eigenvalues(h); }

struct EigenBounds {
    double min = 0.0;
    double max = 0.0;
};

template <typename Scalar>
EigenBounds hermitian_eigen_bounds(const DenseMatrix<Scalar>& g) {
    const std::vector<double> ev = hermitian_eigenvalues(g);
    if (ev.empty()) throw domain_error("hermitian_eigen_bounds: empty matrix");
    return {ev.front(), ev.back()};
}

// Largest eigenvalue of A^H A via power iteration on x -> A^H (A x).
// Deterministic ramp start vector; relative Rayleigh tolerance 1e-13.
template <typename Scalar>
double gram_spectral_bound(const DenseMatrix<Scalar>& a, std::size_t max_iterations = 2000) {
    const std::size_t n = a.cols();
    if (a.empty()) throw domain_error("gram_spectral_bound: empty matrix");
    std::vector<Scalar> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = Scalar{1.0 + static_cast<double>(i % 7) / 7.0};
    double nv = l2_norm(v);
    for (Scalar& x : v) x /= Scalar{nv};

    double lambda = 0.0;
    for (std::size_t it = 0; it < max_iterations; ++it) {
        const std::vector<Scalar> av = matvec(a, v);
        std::vector<Scalar> w = adjoint_matvec(a, av);
        const double next = std::abs(std::real(std::complex<double>(dot(v, w))));
        const double wn = l2_norm(w);
        if (wn == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / Scalar{wn};
        if (it > 0 && std::abs(next - lambda) <= 1e-13 * std::max(1.0, next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return lambda;
}

}  // namespace sparsedet
