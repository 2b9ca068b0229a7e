#pragma once

// Detection theory: the incoherence parameter
//     gamma(A, S) = || A_{S^c}^H A_S (A_S^H A_S)^{-1} ||_inf,
// the minimum regularization weight that bounds the probability of any
// false alarm, the classical per-cell threshold, false-alarm and detection
// accounting, and the brute-force restricted-isometry cross-check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "sparsedet/linalg.hpp"
#include "sparsedet/matrix.hpp"

namespace sparsedet {

struct Thm1Inputs {
    double sigma = 1.0;                // subgaussian noise parameter
    double gamma = 0.0;                // incoherence of (A, S)
    std::size_t n = 0;                 // grid size
    std::size_t k = 0;                 // sparsity
    double max_offsupport_norm = 1.0;  // max_{j in S^c} ||a_j||_2
    double failure_p = 0.1;            // target probability of any false alarm
};

namespace detail {

// Solves G u = A_S^H a_j for every off-support column (no explicit inverse)
// and folds the |u| entries with `fold`. K-dimensional Cholesky solves.
template <typename Scalar, typename Fold>
double incoherence_fold(const DenseMatrix<Scalar>& a, const std::vector<std::size_t>& s, Fold fold) {
    if (s.empty()) throw domain_error("incoherence_gamma: support must be nonempty");
    const DenseMatrix<Scalar> a_s = column_subset(a, s);
    const DenseMatrix<Scalar> g = gram(a_s, a_s);

    const EigenBounds bounds = hermitian_eigen_bounds(g);
    if (!(bounds.min > 0.0) || bounds.max / bounds.min > 1e12)
        throw domain_error("incoherence_gamma: support Gram is singular or ill-conditioned");
    const auto chol = cholesky_factor(g);
    if (!chol) throw domain_error("incoherence_gamma: support Gram is not positive definite");

    std::vector<bool> in_s(a.cols(), false);
    for (std::size_t idx : s) in_s[idx] = true;

    const std::size_t k = s.size();
    std::vector<Scalar> rhs(k);
    double out = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        if (in_s[j]) continue;
        for (std::size_t i = 0; i < k; ++i) {
            Scalar acc{};
            for (std::size_t r = 0; r < a.rows(); ++r) acc += scalar_conj(a_s(r, i)) * a(r, j);
            rhs[i] = acc;
        }
        const std::vector<Scalar> u = cholesky_solve(*chol, rhs);
        out = std::max(out, fold(u));
    }
    return out;
}

}  // namespace detail

// Max absolute row sum of A_{S^c}^H A_S (A_S^H A_S)^{-1}; modulus row sums in
// the complex field. Indices are 0-based.
template <typename Scalar>
double incoherence_gamma(const DenseMatrix<Scalar>& a, const std::vector<std::size_t>& s) {
    return detail::incoherence_fold(a, s, [](const std::vector<Scalar>& u) {
        double sum = 0.0;
        for (const Scalar& v : u) sum += scalar_abs(v);
        return sum;
    });
}

// Largest single modulus entry of the same matrix. A weaker per-column
// diagnostic: for |S| = 1 it coincides with incoherence_gamma, and for the
// bundled chirp configuration it reproduces the shipped reference values
// where the row-sum norm exceeds 1.
template <typename Scalar>
double incoherence_entry_max(const DenseMatrix<Scalar>& a, const std::vector<std::size_t>& s) {
    return detail::incoherence_fold(a, s, [](const std::vector<Scalar>& u) {
        double best = 0.0;
        for (const Scalar& v : u) best = std::max(best, static_cast<double>(scalar_abs(v)));
        return best;
    });
}

// sqrt(2) sigma max_norm / (1 - gamma) * sqrt(ln(2 (N - K) / p)).
inline double min_h(const Thm1Inputs& in) {
    if (!(in.failure_p > 0.0 && in.failure_p < 1.0))
        throw domain_error("min_h: failure probability must lie in (0, 1)");
    if (in.k >= in.n) throw domain_error("min_h: sparsity K must be below the grid size N");
    if (in.sigma < 0.0 || in.max_offsupport_norm < 0.0)
        throw domain_error("min_h: sigma and column norm must be nonnegative");
    if (in.gamma >= 1.0) throw domain_error("gamma >= 1 gives unbounded h");
    if (in.gamma < 0.0) throw domain_error("min_h: gamma must be nonnegative");
    const double log_term =
        std::log(2.0 * static_cast<double>(in.n - in.k) / in.failure_p);
    return std::numbers::sqrt2 * in.sigma * in.max_offsupport_norm / (1.0 - in.gamma) *
           std::sqrt(log_term);
}

// eta = ||a_i||_2 sigma sqrt(ln(1 / P_fa)).
inline double traditional_threshold(double sigma, double column_norm, double pfa) {
    if (!(pfa > 0.0 && pfa <= 1.0)) throw domain_error("traditional_threshold: P_fa must lie in (0, 1]");
    if (sigma < 0.0 || column_norm < 0.0)
        throw domain_error("traditional_threshold: sigma and column norm must be nonnegative");
    return column_norm * sigma * std::sqrt(std::log(1.0 / pfa));
}

// { i : |b_i| > eta }, strict inequality. 0-based indices.
template <typename Scalar>
std::vector<std::size_t> threshold_detect(const std::vector<Scalar>& b, double eta) {
    if (eta < 0.0) throw domain_error("threshold_detect: threshold must be nonnegative");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (scalar_abs(b[i]) > eta) out.push_back(i);
    }
    return out;
}

// |recovered intersect S^c|. Missed detections are not false alarms.
inline std::size_t count_false_alarms(const std::vector<std::size_t>& recovered,
                                      const std::vector<std::size_t>& s) {
    std::vector<std::size_t> sorted_s(s);
    std::sort(sorted_s.begin(), sorted_s.end());
    std::size_t count = 0;
    for (std::size_t idx : recovered) {
        if (!std::binary_search(sorted_s.begin(), sorted_s.end(), idx)) ++count;
    }
    return count;
}

inline double binomial_coefficient_budget(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
        if (c > 1e15) return c;
    }
    return c;
}

// delta_K = max over all size-K supports T of
//           max(lambda_max(A_T^H A_T) - 1, 1 - lambda_min(A_T^H A_T)).
// Exhaustive enumeration, desk scale only (C(N, K) <= 1e6).
template <typename Scalar>
double rip_delta_bruteforce(const DenseMatrix<Scalar>& a, std::size_t k) {
    const std::size_t n = a.cols();
    if (k == 0 || k > n) throw domain_error("rip_delta_bruteforce: K must lie in [1, N]");
    if (binomial_coefficient_budget(n, k) > 1e6)
        throw domain_error("rip_delta_bruteforce: combinatorial budget exceeded (C(N,K) > 1e6)");

    std::vector<std::size_t> support(k);
    for (std::size_t i = 0; i < k; ++i) support[i] = i;

    double delta = 0.0;
    bool more = true;
    while (more) {
        const DenseMatrix<Scalar> a_t = column_subset(a, support);
        const EigenBounds b = hermitian_eigen_bounds(gram(a_t, a_t));
        delta = std::max({delta, b.max - 1.0, 1.0 - b.min});

        // next lexicographic combination
        more = false;
        std::size_t i = k;
        while (i-- > 0) {
            if (support[i] < n - k + i) {
                ++support[i];
                for (std::size_t j = i + 1; j < k; ++j) support[j] = support[j - 1] + 1;
                more = true;
                break;
            }
        }
    }
    return delta;
}

// gamma <= sqrt(K) delta / (1 - delta) for K-RIP conditioning delta.
inline double gamma_rip_bound(double delta, std::size_t k) {
    if (delta < 0.0 || delta >= 1.0) throw domain_error("gamma_rip_bound: delta must lie in [0, 1)");
    return std::sqrt(static_cast<double>(k)) * delta / (1.0 - delta);
}

enum class DetectionMethod { lasso, matched_filter };

// Outcome of a single detection pass against a known true support.
// For the LASSO method, recovered_support and false_alarms refer to the
// truncated solution; hits and the pre_truncation_* fields refer to the raw
// solver support (nonzero before truncation), which is the bias-robust
// per-target detection statistic.
struct DetectionReport {
    std::vector<std::size_t> recovered_support;  // 0-based, sorted
    std::size_t false_alarms = 0;
    std::vector<bool> hits;  // aligned with the true support order
    DetectionMethod method = DetectionMethod::lasso;
    double parameter = 0.0;  // h (lasso) or eta (matched filter)
    std::optional<double> alpha_pfa;
    std::vector<std::size_t> pre_truncation_support;
    std::size_t pre_truncation_false_alarms = 0;
};

}  // namespace sparsedet
