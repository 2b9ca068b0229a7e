#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "sparsedet/detect.hpp"
#include "sparsedet/dictionary.hpp"

using namespace sparsedet;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "sparsedet_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("chirp dictionary matches the bundled configuration") {
    const ChirpSpec spec{25.0, 1.0, true};
    const auto dict = build_chirp_dictionary<std::complex<double>>(spec, 108, 250);

    CHECK(dict.rows_m() == 108);
    CHECK(dict.cols_n() == 250);
    CHECK(dict.delay_step == Catch::Approx(1.0 / 3.0).epsilon(1e-15));

    for (std::size_t c = 0; c < dict.cols_n(); ++c) {
        const double norm = l2_norm(dict.entries.column(c));
        CHECK(std::abs(norm - 1.0) <= 1e-12);
    }

    // The first column is the undelayed replica: 25 unit-magnitude samples
    // scaled by 1/5, zero afterwards.
    CHECK(std::abs(dict.entries(0, 0) - std::complex<double>{0.2, 0.0}) < 1e-15);
    CHECK(std::abs(dict.entries(24, 0)) == Catch::Approx(0.2).epsilon(1e-12));
    CHECK(std::abs(dict.entries(25, 0)) == 0.0);
}

TEST_CASE("integer-delay real dictionary has exact shifted copies") {
    const ChirpSpec spec{2.0, 1.0, false};
    const auto dict = build_chirp_dictionary<double>(spec, 4, 3);
    CHECK(dict.delay_step == 1.0);
    for (std::size_t c = 0; c + 1 < 3; ++c) {
        for (std::size_t r = 0; r + 1 < 4; ++r) {
            CHECK(dict.entries(r, c) == dict.entries(r + 1, c + 1));
        }
    }
}

TEST_CASE("chirp dictionary build is deterministic") {
    const ChirpSpec spec{25.0, 1.0, true};
    const auto a = build_chirp_dictionary<std::complex<double>>(spec, 108, 250);
    const auto b = build_chirp_dictionary<std::complex<double>>(spec, 108, 250);
    CHECK(a.entries == b.entries);
}

TEST_CASE("chirp dictionary rejects invalid shapes") {
    const ChirpSpec spec{25.0, 1.0, true};
    CHECK_THROWS_AS((build_chirp_dictionary<std::complex<double>>(spec, 25, 10)), domain_error);
    CHECK_THROWS_AS((build_chirp_dictionary<std::complex<double>>(spec, 20, 10)), domain_error);
    CHECK_THROWS_AS((build_chirp_dictionary<std::complex<double>>(spec, 108, 0)), domain_error);
}

TEST_CASE("paper-scale incoherence diagnostic for a single target") {
    const ChirpSpec spec{25.0, 1.0, true};
    const auto dict = build_chirp_dictionary<std::complex<double>>(spec, 108, 250);
    const double gamma = incoherence_gamma(dict.entries, {99});
    CHECK(gamma == Catch::Approx(0.8272).margin(0.05));
}

TEST_CASE("dictionary file round-trip is bit exact") {
    const ChirpSpec spec{25.0, 1.0, true};
    const auto dict = build_chirp_dictionary<std::complex<double>>(spec, 30, 40);
    const fs::path path = temp_file("roundtrip_complex.dict");
    save_dictionary(dict, path);

    const AnyDictionary loaded = load_dictionary(path);
    const auto& back = std::get<ComplexDictionary>(loaded);
    CHECK(back.entries == dict.entries);
    CHECK(back.delay_step == dict.delay_step);
    CHECK(back.chirp.length_l == dict.chirp.length_l);
    CHECK(back.chirp.bandwidth_b == dict.chirp.bandwidth_b);
    CHECK(back.origin == DictionaryOrigin::loaded_from_file);

    const ChirpSpec rspec{2.0, 1.0, false};
    const auto rdict = build_chirp_dictionary<double>(rspec, 6, 5);
    const fs::path rpath = temp_file("roundtrip_real.dict");
    save_dictionary(rdict, rpath);
    const AnyDictionary rloaded = load_dictionary(rpath);
    const auto& rback = std::get<RealDictionary>(rloaded);
    CHECK(rback.entries == rdict.entries);
}

TEST_CASE("dictionary loader rejects malformed files") {
    SECTION("wrong banner") {
        const fs::path p = temp_file("bad_banner.dict");
        std::ofstream(p) << "sparsedet-dict v9\nM=1 N=1 field=real delay_step=1 L=1 B=1\n0.5\n";
        CHECK_THROWS_AS(load_dictionary(p), io_error);
    }
    SECTION("row count mismatch") {
        const fs::path p = temp_file("short_rows.dict");
        std::ofstream(p) << "sparsedet-dict v1\nM=4 N=3 field=real delay_step=1 L=2 B=1\n"
                            "1,0,0\n0,1,0\n0,0,1\n";
        CHECK_THROWS_MATCHES(load_dictionary(p), io_error,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("dimension mismatch")));
    }
    SECTION("column count mismatch") {
        const fs::path p = temp_file("short_cols.dict");
        std::ofstream(p) << "sparsedet-dict v1\nM=2 N=3 field=real delay_step=1 L=1 B=1\n"
                            "1,0\n0,1\n";
        CHECK_THROWS_MATCHES(load_dictionary(p), io_error,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("dimension mismatch")));
    }
    SECTION("non-finite entry") {
        const fs::path p = temp_file("nan_entry.dict");
        std::ofstream(p) << "sparsedet-dict v1\nM=1 N=2 field=real delay_step=1 L=1 B=1\n"
                            "1.0,nan\n";
        CHECK_THROWS_MATCHES(load_dictionary(p), io_error,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("non-finite")));
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(load_dictionary(temp_file("missing_file.dict")), io_error);
    }
}
