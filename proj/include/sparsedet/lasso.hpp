#pragma once

// l1-regularized least squares
//     minimize  0.5 ||y - A x||_2^2 + h ||x||_1
// solved by a monotone accelerated proximal-gradient method with step 1/L
// (L from power iteration on the Gram operator) and a duality-gap stopping
// certificate. Complex mode uses the modulus l1 norm and modulus
// soft-thresholding. Also provides the KKT optimality residual, the
// exhaustive small-instance oracle, and the post-solve truncation rule.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "sparsedet/linalg.hpp"
#include "sparsedet/matrix.hpp"

namespace sparsedet {

struct SolverConfig {
    std::size_t max_iterations = 50000;
    double duality_gap_tol = 1e-9;  // relative: gap <= tol * max(1, objective)
    double kkt_tol = 1e-7;
    double truncation_ratio = 0.1;
};

template <typename Scalar>
struct LassoSolution {
    std::vector<Scalar> x;
    double h = 0.0;
    double objective = 0.0;
    std::size_t iterations = 0;
    double duality_gap = 0.0;
    double kkt_residual = 0.0;
    bool converged = false;
};

template <typename Scalar>
double lasso_objective(const DenseMatrix<Scalar>& a, const std::vector<Scalar>& y, double h,
                       const std::vector<Scalar>& x) {
    const std::vector<Scalar> ax = matvec(a, x);
    double fit = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = scalar_abs(Scalar{y[i] - ax[i]});
        fit += d * d;
    }
    double l1 = 0.0;
    for (const Scalar& v : x) l1 += scalar_abs(v);
    return 0.5 * fit + h * l1;
}

// max_i of: (|r_i| - h)_+ where x_i = 0, |r_i - h sign(x_i)| where x_i != 0,
// with r = A^H (y - A x) and complex sign(x) = x / |x|. Zero iff x optimal.
template <typename Scalar>
double kkt_residual(const DenseMatrix<Scalar>& a, const std::vector<Scalar>& y, double h,
                    const std::vector<Scalar>& x) {
    const std::vector<Scalar> ax = matvec(a, x);
    std::vector<Scalar> resid(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) resid[i] = y[i] - ax[i];
    const std::vector<Scalar> r = adjoint_matvec(a, resid);

    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double v;
        if (scalar_abs(x[i]) == 0.0) {
            v = std::max(0.0, scalar_abs(r[i]) - h);
        } else {
            const Scalar sign = x[i] / Scalar{scalar_abs(x[i])};
            v = scalar_abs(Scalar{r[i] - Scalar{h} * sign});
        }
        worst = std::max(worst, v);
    }
    return worst;
}

// Entries with |x_i| < ratio * h are zeroed; the boundary value is kept.
template <typename Scalar>
std::vector<Scalar> truncate_small(std::vector<Scalar> x, double h, double ratio) {
    if (ratio < 0.0 || ratio >= 1.0) throw domain_error("truncate_small: ratio must lie in [0, 1)");
    const double cut = ratio * h;
    for (Scalar& v : x) {
        if (scalar_abs(v) < cut) v = Scalar{};
    }
    return x;
}

namespace detail {

template <typename Scalar>
Scalar soft_threshold(const Scalar& g, double tau) {
    const double mag = scalar_abs(g);
    if (mag <= tau) return Scalar{};
    return g * Scalar{1.0 - tau / mag};
}

// Primal-dual gap at x. The dual candidate rescales the residual into
// feasibility: nu = r * min(1, h / ||A^H r||_inf),
// D(nu) = Re<nu, y> - 0.5 ||nu||^2.
template <typename Scalar>
double lasso_duality_gap(const std::vector<Scalar>& y, const std::vector<Scalar>& resid,
                         const std::vector<Scalar>& corr, double h, double primal) {
    const double cinf = linf_norm(corr);
    const double scale = (cinf > h && cinf > 0.0) ? h / cinf : 1.0;
    double ry = 0.0, rr = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ry += std::real(std::complex<double>(scalar_conj(resid[i]) * y[i]));
        const double m = scalar_abs(resid[i]);
        rr += m * m;
    }
    const double dual = scale * ry - 0.5 * scale * scale * rr;
    return primal - dual;
}

}  // namespace detail

template <typename Scalar>
LassoSolution<Scalar> lasso_solve(const DenseMatrix<Scalar>& a, const std::vector<Scalar>& y,
                                  double h, const SolverConfig& cfg = {}) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (y.size() != m) throw domain_error("lasso_solve: dimension mismatch");
    if (h < 0.0) throw domain_error("lasso_solve: h must be nonnegative");
    if (h == 0.0 && m < n)
        throw domain_error("lasso_solve: h = 0 with M < N is underdetermined (non-unique least squares)");
    if (cfg.max_iterations == 0 || cfg.duality_gap_tol <= 0.0 || cfg.kkt_tol <= 0.0)
        throw domain_error("lasso_solve: solver tolerances must be positive");

    const double lipschitz = std::max(gram_spectral_bound(a) * 1.0000001, 1e-30);
    const double step = 1.0 / lipschitz;

    std::vector<Scalar> x(n, Scalar{});
    std::vector<Scalar> x_prev = x;
    std::vector<Scalar> z = x;
    double t = 1.0;
    double obj_x = lasso_objective(a, y, h, x);

    LassoSolution<Scalar> sol;
    sol.h = h;

    std::vector<Scalar> u(n);
    std::vector<Scalar> resid(m);
    const std::size_t check_every = 10;

    std::size_t it = 0;
    for (it = 1; it <= cfg.max_iterations; ++it) {
        // Gradient step at the momentum point z.
        const std::vector<Scalar> az = matvec(a, z);
        for (std::size_t i = 0; i < m; ++i) resid[i] = az[i] - y[i];
        const std::vector<Scalar> grad = adjoint_matvec(a, resid);
        for (std::size_t i = 0; i < n; ++i)
            u[i] = detail::soft_threshold(Scalar{z[i] - Scalar{step} * grad[i]}, h * step);

        const double obj_u = lasso_objective(a, y, h, u);

        // Monotone acceleration: keep the previous iterate when the proximal
        // step would increase the objective, but still advance the momentum.
        x_prev = x;
        if (obj_u <= obj_x) {
            x = u;
            obj_x = obj_u;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = x[i] + Scalar{t / t_next} * (u[i] - x[i]) +
                   Scalar{(t - 1.0) / t_next} * (x[i] - x_prev[i]);
        }
        t = t_next;

        if (it == 1 || it % check_every == 0 || it == cfg.max_iterations) {
            const std::vector<Scalar> ax = matvec(a, x);
            for (std::size_t i = 0; i < m; ++i) resid[i] = y[i] - ax[i];
            const std::vector<Scalar> corr = adjoint_matvec(a, resid);
            double fit = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double d = scalar_abs(resid[i]);
                fit += d * d;
            }
            double l1 = 0.0;
            for (const Scalar& v : x) l1 += scalar_abs(v);
            const double primal = 0.5 * fit + h * l1;
            const double gap = detail::lasso_duality_gap(y, resid, corr, h, primal);

            double kkt = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double v;
                if (scalar_abs(x[i]) == 0.0) {
                    v = std::max(0.0, scalar_abs(corr[i]) - h);
                } else {
                    const Scalar sign = x[i] / Scalar{scalar_abs(x[i])};
                    v = scalar_abs(Scalar{corr[i] - Scalar{h} * sign});
                }
                kkt = std::max(kkt, v);
            }

            sol.objective = primal;
            sol.duality_gap = gap;
            sol.kkt_residual = kkt;
            if (gap <= cfg.duality_gap_tol * std::max(1.0, primal) && kkt <= cfg.kkt_tol) {
                sol.converged = true;
                break;
            }
        }
    }

    sol.x = std::move(x);
    sol.iterations = std::min(it, cfg.max_iterations);
    return sol;
}

// Exhaustive reference solver for small real instances: enumerates every
// support and sign pattern, solves the stationarity system
// A_T^T A_T w = A_T^T y - h s, keeps KKT-feasible candidates and returns the
// one with the smallest objective. Singular candidate systems are skipped.
inline std::vector<double> oracle_solve(const RealMatrix& a, const std::vector<double>& y, double h) {
    const std::size_t n = a.cols();
    if (y.size() != a.rows()) throw domain_error("oracle_solve: dimension mismatch");
    if (n > 12) throw domain_error("oracle_solve: N must be at most 12");
    if (h < 0.0) throw domain_error("oracle_solve: h must be nonnegative");

    const std::vector<double> aty = adjoint_matvec(a, y);
    const double feas_tol = 1e-9;

    std::vector<double> best;
    double best_obj = std::numeric_limits<double>::infinity();

    // The zero vector is a candidate whenever it satisfies the KKT bound.
    if (linf_norm(aty) <= h + feas_tol) {
        best.assign(n, 0.0);
        best_obj = lasso_objective(a, y, h, best);
    }

    std::vector<std::size_t> support;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        support.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) support.push_back(i);
        }
        const std::size_t k = support.size();
        const RealMatrix at_cols = column_subset(a, support);
        const RealMatrix g = gram(at_cols, at_cols);

        for (std::uint32_t signs = 0; signs < (1u << k); ++signs) {
            std::vector<double> rhs(k);
            for (std::size_t i = 0; i < k; ++i) {
                const double s = (signs & (1u << i)) ? -1.0 : 1.0;
                rhs[i] = aty[support[i]] - h * s;
            }
            const auto w = gauss_solve(g, rhs);
            if (!w) break;  // singular Gram: no sign pattern on this support resolves it

            bool sign_ok = true;
            for (std::size_t i = 0; i < k && sign_ok; ++i) {
                const double s = (signs & (1u << i)) ? -1.0 : 1.0;
                sign_ok = ((*w)[i] * s) > 0.0;
            }
            if (!sign_ok) continue;

            std::vector<double> x(n, 0.0);
            for (std::size_t i = 0; i < k; ++i) x[support[i]] = (*w)[i];
            if (kkt_residual(a, y, h, x) > feas_tol * std::max(1.0, h)) continue;

            const double obj = lasso_objective(a, y, h, x);
            if (obj < best_obj) {
                best_obj = obj;
                best = std::move(x);
            }
        }
    }

    if (best.empty() && best_obj == std::numeric_limits<double>::infinity())
        throw domain_error("oracle_solve: no KKT-feasible candidate found");
    return best;
}

}  // namespace sparsedet
