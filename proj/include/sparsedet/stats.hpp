#pragma once

// Statistical routines for the detection studies: the standard normal
// quantile (exact-quantile threshold calibration), the regularized
// incomplete gamma function (chi-square tail probabilities), binomial
// probabilities and a chi-square goodness-of-fit test against a binomial
// false-alarm law.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "sparsedet/common.hpp"

namespace sparsedet {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Acklam's rational approximation refined by one Halley step against erfc.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw domain_error("normal_quantile: p must lie in (0, 1)");

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};

    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley refinement.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

// Lower regularized incomplete gamma P(a, x): series for x < a + 1,
// Lentz continued fraction otherwise.
inline double lower_regularized_gamma(double a, double x) {
    if (a <= 0.0) throw domain_error("lower_regularized_gamma: a must be positive");
    if (x < 0.0) throw domain_error("lower_regularized_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;

    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }

    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double frac = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        frac *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * frac;
    return 1.0 - q;
}

// Survival function of chi-square with `dof` degrees of freedom.
inline double chi_square_sf(double x, double dof) {
    if (dof <= 0.0) throw domain_error("chi_square_sf: dof must be positive");
    if (x <= 0.0) return 1.0;
    return 1.0 - lower_regularized_gamma(0.5 * dof, 0.5 * x);
}

inline double binomial_pmf(std::size_t k, std::size_t n, double p) {
    if (k > n) return 0.0;
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("binomial_pmf: p must lie in [0, 1]");
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == n ? 1.0 : 0.0;
    const double log_pmf = std::lgamma(static_cast<double>(n) + 1.0) -
                           std::lgamma(static_cast<double>(k) + 1.0) -
                           std::lgamma(static_cast<double>(n - k) + 1.0) +
                           static_cast<double>(k) * std::log(p) +
                           static_cast<double>(n - k) * std::log1p(-p);
    return std::exp(log_pmf);
}

struct GofResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    std::size_t bins = 0;
};

// Chi-square goodness of fit of an observed histogram of counts-per-trial
// (observed[v] = number of trials with value v) against Binomial(n, p).
// Adjacent cells are pooled left to right until each bin's expected count
// reaches min_expected; the remaining upper tail forms the final bin.
inline GofResult chi_square_binomial_gof(const std::vector<std::size_t>& observed,
                                         std::size_t trials, std::size_t n, double p,
                                         double min_expected = 5.0) {
    if (trials == 0) throw domain_error("chi_square_binomial_gof: no trials");
    double expected_acc = 0.0;
    std::size_t observed_acc = 0;
    std::vector<double> expected_bins;
    std::vector<double> observed_bins;

    std::size_t total_observed = 0;
    const std::size_t max_value = n;
    for (std::size_t v = 0; v <= max_value; ++v) {
        const std::size_t obs = v < observed.size() ? observed[v] : 0;
        total_observed += obs;
        expected_acc += static_cast<double>(trials) * binomial_pmf(v, n, p);
        observed_acc += obs;
        if (expected_acc >= min_expected) {
            expected_bins.push_back(expected_acc);
            observed_bins.push_back(static_cast<double>(observed_acc));
            expected_acc = 0.0;
            observed_acc = 0;
        }
    }
    if (total_observed != trials)
        throw domain_error("chi_square_binomial_gof: histogram does not sum to the trial count");

    // Fold the leftover tail into the last bin.
    if (!expected_bins.empty()) {
        expected_bins.back() += expected_acc;
        observed_bins.back() += static_cast<double>(observed_acc);
    } else {
        expected_bins.push_back(expected_acc);
        observed_bins.push_back(static_cast<double>(observed_acc));
    }

    if (expected_bins.size() < 2)
        throw domain_error("chi_square_binomial_gof: too few bins with the requested expected count");

    double stat = 0.0;
    for (std::size_t i = 0; i < expected_bins.size(); ++i) {
        const double diff = observed_bins[i] - expected_bins[i];
        stat += diff * diff / expected_bins[i];
    }

    GofResult out;
    out.statistic = stat;
    out.bins = expected_bins.size();
    out.dof = expected_bins.size() - 1;
    out.p_value = chi_square_sf(stat, static_cast<double>(out.dof));
    return out;
}

}  // namespace sparsedet
