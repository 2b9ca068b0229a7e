#pragma once

// Sparse target scenes, subgaussian noise generation and measurement
// synthesis y = A x* + e, plus the matched filter b = A^H y.
//
// Reproducibility contract: every draw comes from std::mt19937_64 (whose
// output sequence is fixed by the standard) seeded with
// derive_stream_seed(seed, trial_index), fed through the documented
// transformations below (53-bit uniforms, Box-Muller pairs). Identical
// (seed, trial_index) always reproduce the identical vector.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sparsedet/dictionary.hpp"
#include "sparsedet/matrix.hpp"

namespace sparsedet {

enum class NoiseFamily { gaussian, rademacher, uniform };

// Complex-noise convention: `total` splits the subgaussian parameter so the
// per-entry total variance budget matches the real case; `per_component`
// applies the full parameter to each of the real and imaginary parts.
enum class VarianceConvention { total, per_component };

struct NoiseSpec {
    NoiseFamily family = NoiseFamily::gaussian;
    double sigma = 1.0;  // subgaussian parameter, not necessarily the std dev
    bool complex_valued = true;
    std::uint64_t seed = 0;
    VarianceConvention variance_convention = VarianceConvention::total;
};

template <typename Scalar>
struct TargetScene {
    std::size_t grid_size_n = 0;
    std::vector<std::size_t> support;  // 0-based internally; 1-based at the CLI
    std::vector<Scalar> amplitudes;    // nonzero, aligned with support
};

template <typename Scalar>
void validate_scene(const TargetScene<Scalar>& scene) {
    if (scene.support.size() != scene.amplitudes.size())
        throw domain_error("scene: support and amplitude lists differ in length");
    if (scene.support.size() > scene.grid_size_n)
        throw domain_error("scene: more targets than grid cells");
    std::vector<bool> seen(scene.grid_size_n, false);
    for (std::size_t i = 0; i < scene.support.size(); ++i) {
        if (scene.support[i] >= scene.grid_size_n)
            throw domain_error("scene: target index out of range");
        if (seen[scene.support[i]]) throw domain_error("scene: duplicate target index");
        seen[scene.support[i]] = true;
        if (scalar_abs(scene.amplitudes[i]) == 0.0)
            throw domain_error("scene: zero amplitude on the support");
    }
}

template <typename Scalar>
struct MeasurementRecord {
    std::vector<Scalar> y;
    TargetScene<Scalar> scene;
    NoiseSpec noise;
    std::string dictionary_id;
};

inline double snr_db_to_sigma(double snr_db) { return std::pow(10.0, -snr_db / 20.0); }

// 64-bit finalizer (Stafford mix13); stable across platforms.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

// Stable per-trial seed: mix64 folded over (master, k, snr in centi-dB, trial).
inline std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t k, double snr_db,
                                       std::uint64_t trial_index) {
    const auto centi_db = static_cast<std::int64_t>(std::llround(snr_db * 100.0));
    std::uint64_t h = mix64(master_seed ^ 0x5bf03635d6a11e8bULL);
    h = mix64(h ^ k);
    h = mix64(h ^ static_cast<std::uint64_t>(centi_db));
    h = mix64(h ^ trial_index);
    return h;
}

namespace detail {

inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;  // [0, 1)
}

// One Box-Muller pair; u1 is shifted into (0, 1].
inline std::pair<double, double> standard_normal_pair(std::mt19937_64& eng) {
    const double u1 = (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01(eng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

inline double rademacher(std::mt19937_64& eng) { return (eng() >> 63) ? -1.0 : 1.0; }

// Uniform on [-1, 1) from one 53-bit draw.
inline double uniform_symmetric(std::mt19937_64& eng) { return 2.0 * uniform01(eng) - 1.0; }

}  // namespace detail

// Length-M i.i.d. subgaussian draw with parameter spec.sigma. In complex
// mode the real and imaginary parts are independent; under the `total`
// convention each carries parameter sigma/sqrt(2) (Gaussian: variance
// sigma^2/2 per part, sigma^2 per entry). Family variances for parameter s:
// gaussian s^2, rademacher s^2, uniform on [-s, s) s^2/3.
template <typename Scalar>
std::vector<Scalar> sample_noise(const NoiseSpec& spec, std::size_t m, std::uint64_t trial_index) {
    if (spec.sigma < 0.0) throw domain_error("sample_noise: sigma must be nonnegative");
    std::mt19937_64 eng(derive_stream_seed(spec.seed, trial_index));
    std::vector<Scalar> e(m, Scalar{});

    const double component_sigma = [&] {
        if constexpr (is_complex_v<Scalar>) {
            return spec.variance_convention == VarianceConvention::total
                       ? spec.sigma / std::numbers::sqrt2
                       : spec.sigma;
        } else {
            return spec.sigma;
        }
    }();

    const auto draw_component = [&](std::mt19937_64& gen, double& pending,
                                    bool& has_pending) -> double {
        switch (spec.family) {
            case NoiseFamily::gaussian: {
                if (has_pending) {
                    has_pending = false;
                    return pending;
                }
                const auto [z0, z1] = detail::standard_normal_pair(gen);
                pending = z1;
                has_pending = true;
                return z0;
            }
            case NoiseFamily::rademacher:
                return detail::rademacher(gen);
            case NoiseFamily::uniform:
                return detail::uniform_symmetric(gen);
        }
        throw domain_error("sample_noise: unknown noise family");
    };

    double pending = 0.0;
    bool has_pending = false;
    for (std::size_t i = 0; i < m; ++i) {
        if constexpr (is_complex_v<Scalar>) {
            const double re = draw_component(eng, pending, has_pending);
            const double im = draw_component(eng, pending, has_pending);
            e[i] = Scalar{re * component_sigma, im * component_sigma};
        } else {
            e[i] = draw_component(eng, pending, has_pending) * component_sigma;
        }
    }
    return e;
}

// y = sum_{i in S} x*(i) a_i + e, assembled from the sparse expansion.
template <typename Scalar>
MeasurementRecord<Scalar> synthesize_measurement(const Dictionary<Scalar>& dict,
                                                 const TargetScene<Scalar>& scene,
                                                 const NoiseSpec& noise, std::uint64_t trial_index) {
    if (scene.grid_size_n != dict.cols_n())
        throw domain_error("synthesize_measurement: scene grid does not match dictionary N");
    validate_scene(scene);

    MeasurementRecord<Scalar> record;
    record.y = sample_noise<Scalar>(noise, dict.rows_m(), trial_index);
    for (std::size_t k = 0; k < scene.support.size(); ++k) {
        const std::size_t col = scene.support[k];
        const Scalar amp = scene.amplitudes[k];
        for (std::size_t r = 0; r < dict.rows_m(); ++r) record.y[r] += amp * dict.entries(r, col);
    }
    record.scene = scene;
    record.noise = noise;
    record.dictionary_id = dictionary_id(dict);
    return record;
}

// b = A^H y.
template <typename Scalar>
std::vector<Scalar> matched_filter(const Dictionary<Scalar>& dict, const std::vector<Scalar>& y) {
    return adjoint_matvec(dict.entries, y);
}

template <typename Scalar>
std::vector<Scalar> matched_filter(const DenseMatrix<Scalar>& a, const std::vector<Scalar>& y) {
    return adjoint_matvec(a, y);
}

}  // namespace sparsedet
