#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "sparsedet/scene.hpp"

using namespace sparsedet;
using Complex = std::complex<double>;

TEST_CASE("snr to sigma") {
    CHECK(snr_db_to_sigma(0.0) == 1.0);
    CHECK(snr_db_to_sigma(19.0) == Catch::Approx(0.11220184543019636).epsilon(1e-15));
    CHECK(snr_db_to_sigma(33.0) == Catch::Approx(0.0223872113856834).epsilon(1e-14));
}

TEST_CASE("noise is reproducible and trial-indexed") {
    NoiseSpec spec;
    spec.sigma = 0.7;
    spec.seed = 123456789;
    const auto a = sample_noise<Complex>(spec, 64, 3);
    const auto b = sample_noise<Complex>(spec, 64, 3);
    CHECK(a == b);

    const auto c = sample_noise<Complex>(spec, 64, 4);
    CHECK(a != c);

    spec.seed = 987654321;
    CHECK(a != sample_noise<Complex>(spec, 64, 3));
}

TEST_CASE("zero sigma gives the zero vector") {
    NoiseSpec spec;
    spec.sigma = 0.0;
    for (const Complex& v : sample_noise<Complex>(spec, 16, 0)) CHECK(v == Complex{});
    spec.complex_valued = false;
    for (double v : sample_noise<double>(spec, 16, 0)) CHECK(v == 0.0);
}

TEST_CASE("rademacher draws live on {-sigma, +sigma}") {
    NoiseSpec spec;
    spec.family = NoiseFamily::rademacher;
    spec.sigma = 1.0;
    spec.complex_valued = false;
    spec.seed = 5;
    bool saw_plus = false, saw_minus = false;
    for (double v : sample_noise<double>(spec, 200, 0)) {
        CHECK((v == 1.0 || v == -1.0));
        saw_plus = saw_plus || v == 1.0;
        saw_minus = saw_minus || v == -1.0;
    }
    CHECK(saw_plus);
    CHECK(saw_minus);
}

TEST_CASE("noise families match their documented mean and variance") {
    constexpr std::size_t n = 100000;
    const auto stats = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size() - 1);
        return std::pair{mean, var};
    };

    NoiseSpec spec;
    spec.complex_valued = false;
    spec.sigma = 1.0;
    spec.seed = 20240;

    SECTION("gaussian: variance sigma^2") {
        spec.family = NoiseFamily::gaussian;
        const auto [mean, var] = stats(sample_noise<double>(spec, n, 0));
        CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
        CHECK(var == Catch::Approx(1.0).epsilon(0.03));
    }
    SECTION("rademacher: variance sigma^2") {
        spec.family = NoiseFamily::rademacher;
        const auto [mean, var] = stats(sample_noise<double>(spec, n, 0));
        CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
        CHECK(var == Catch::Approx(1.0).epsilon(0.03));
    }
    SECTION("uniform on [-sigma, sigma): variance sigma^2/3") {
        spec.family = NoiseFamily::uniform;
        const auto [mean, var] = stats(sample_noise<double>(spec, n, 0));
        CHECK(std::abs(mean) < 4.0 / std::sqrt(3.0 * static_cast<double>(n)));
        CHECK(var == Catch::Approx(1.0 / 3.0).epsilon(0.03));
    }
    SECTION("complex gaussian under the total convention: per-entry variance sigma^2") {
        spec.family = NoiseFamily::gaussian;
        spec.complex_valued = true;
        const auto draws = sample_noise<Complex>(spec, n, 0);
        double var = 0.0;
        for (const Complex& z : draws) var += std::norm(z);
        var /= static_cast<double>(n);
        CHECK(var == Catch::Approx(1.0).epsilon(0.03));
    }
    SECTION("complex gaussian per-component convention doubles the budget") {
        spec.family = NoiseFamily::gaussian;
        spec.complex_valued = true;
        spec.variance_convention = VarianceConvention::per_component;
        const auto draws = sample_noise<Complex>(spec, n, 0);
        double var = 0.0;
        for (const Complex& z : draws) var += std::norm(z);
        var /= static_cast<double>(n);
        CHECK(var == Catch::Approx(2.0).epsilon(0.03));
    }
}

TEST_CASE("synthesized measurement equals the dense product when noiseless") {
    const ChirpSpec cspec{25.0, 1.0, true};
    const auto dict = build_chirp_dictionary<Complex>(cspec, 60, 80);

    NoiseSpec noise;
    noise.sigma = 0.0;

    SECTION("single target reproduces its column") {
        TargetScene<Complex> scene{80, {17}, {Complex{1.0, 0.0}}};
        const auto record = synthesize_measurement(dict, scene, noise, 0);
        for (std::size_t r = 0; r < 60; ++r)
            CHECK(std::abs(record.y[r] - dict.entries(r, 17)) < 1e-15);
    }

    SECTION("two targets match the dense multiply") {
        TargetScene<Complex> scene{80, {10, 44}, {Complex{2.0, 0.5}, Complex{-1.0, 0.25}}};
        const auto record = synthesize_measurement(dict, scene, noise, 0);
        std::vector<Complex> dense(80, Complex{});
        dense[10] = Complex{2.0, 0.5};
        dense[44] = Complex{-1.0, 0.25};
        const auto expected = matvec(dict.entries, dense);
        for (std::size_t r = 0; r < 60; ++r) CHECK(std::abs(record.y[r] - expected[r]) < 1e-12);
    }

    SECTION("scene validation") {
        TargetScene<Complex> bad{80, {80}, {Complex{1.0, 0.0}}};
        CHECK_THROWS_AS(synthesize_measurement(dict, bad, noise, 0), domain_error);
        TargetScene<Complex> dup{80, {3, 3}, {Complex{1.0, 0.0}, Complex{1.0, 0.0}}};
        CHECK_THROWS_AS(synthesize_measurement(dict, dup, noise, 0), domain_error);
        TargetScene<Complex> zero_amp{80, {3}, {Complex{}}};
        CHECK_THROWS_AS(synthesize_measurement(dict, zero_amp, noise, 0), domain_error);
        TargetScene<Complex> wrong_grid{81, {3}, {Complex{1.0, 0.0}}};
        CHECK_THROWS_AS(synthesize_measurement(dict, wrong_grid, noise, 0), domain_error);
    }
}

TEST_CASE("matched filter") {
    SECTION("orthonormal columns give a unit indicator") {
        RealMatrix id = RealMatrix::identity(4);
        const auto b = matched_filter(id, std::vector<double>{0.0, 0.0, 1.0, 0.0});
        CHECK(b[2] == 1.0);
        CHECK(b[0] == 0.0);
    }
    SECTION("zero input gives zero output") {
        const ChirpSpec cspec{25.0, 1.0, true};
        const auto dict = build_chirp_dictionary<Complex>(cspec, 40, 50);
        const auto b = matched_filter(dict, std::vector<Complex>(40, Complex{}));
        for (const Complex& v : b) CHECK(v == Complex{});
    }
    SECTION("random instance matches per-column dot products") {
        std::mt19937_64 eng(99);
        std::normal_distribution<double> dist;
        RealMatrix a(5, 3);
        std::vector<double> y(5);
        for (auto& v : y) v = dist(eng);
        for (std::size_t r = 0; r < 5; ++r)
            for (std::size_t c = 0; c < 3; ++c) a(r, c) = dist(eng);
        const auto b = matched_filter(a, y);
        for (std::size_t c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (std::size_t r = 0; r < 5; ++r) acc += a(r, c) * y[r];
            CHECK(b[c] == Catch::Approx(acc).margin(1e-12));
        }
        CHECK_THROWS_AS(matched_filter(a, std::vector<double>(4)), domain_error);
    }
}

TEST_CASE("trial seed derivation separates cells and trials") {
    const auto s1 = derive_trial_seed(1, 1, 19.0, 0);
    CHECK(s1 == derive_trial_seed(1, 1, 19.0, 0));
    CHECK(s1 != derive_trial_seed(1, 1, 19.0, 1));
    CHECK(s1 != derive_trial_seed(1, 2, 19.0, 0));
    CHECK(s1 != derive_trial_seed(1, 1, 22.0, 0));
    CHECK(s1 != derive_trial_seed(2, 1, 19.0, 0));
}
