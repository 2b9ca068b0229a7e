#pragma once

// Measurement dictionary of delayed chirp replicas on a super-resolved delay
// grid, plus the versioned plain-text file format.
//
// Column i holds samples of a(t - tau_i) at integer t in [0, M), where
//   a(s) = exp(j pi B s^2 / L) for s in [0, L), zero elsewhere,
// tau_i = i * delay_step and delay_step = (M - L) / (N - 1) tiles [0, M - L]
// uniformly. Fractional delays are evaluated analytically, not interpolated.
// Real mode takes the real part before normalization. Columns are normalized
// to unit Euclidean norm.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "sparsedet/matrix.hpp"

namespace sparsedet {

struct ChirpSpec {
    double length_l = 25.0;
    double bandwidth_b = 1.0;
    bool complex_valued = true;
};

enum class DictionaryOrigin { synthesized_chirp, loaded_from_file };

template <typename Scalar>
struct Dictionary {
    DenseMatrix<Scalar> entries;        // M x N, unit-norm columns
    double delay_step = 0.0;            // samples between adjacent grid delays
    std::vector<double> column_norms;   // norms of the stored columns
    DictionaryOrigin origin = DictionaryOrigin::synthesized_chirp;
    ChirpSpec chirp;

    std::size_t rows_m() const { return entries.rows(); }
    std::size_t cols_n() const { return entries.cols(); }
};

using RealDictionary = Dictionary<double>;
using ComplexDictionary = Dictionary<std::complex<double>>;
using AnyDictionary = std::variant<RealDictionary, ComplexDictionary>;

namespace detail {

inline std::complex<double> chirp_sample(const ChirpSpec& spec, double s) {
    if (s < 0.0 || s >= spec.length_l) return {0.0, 0.0};
    const double phase = std::numbers::pi * spec.bandwidth_b * s * s / spec.length_l;
    return {std::cos(phase), std::sin(phase)};
}

}  // namespace detail

template <typename Scalar>
Dictionary<Scalar> build_chirp_dictionary(const ChirpSpec& spec, std::size_t m, std::size_t n) {
    if (spec.length_l <= 0.0 || spec.bandwidth_b <= 0.0)
        throw domain_error("build_chirp_dictionary: chirp length and bandwidth must be positive");
    if (n == 0) throw domain_error("build_chirp_dictionary: N must be at least 1");
    if (static_cast<double>(m) <= spec.length_l)
        throw domain_error("build_chirp_dictionary: M must exceed the chirp length");

    const double span = static_cast<double>(m) - spec.length_l;
    const double step = (n > 1) ? span / static_cast<double>(n - 1) : span;

    Dictionary<Scalar> dict;
    dict.entries = DenseMatrix<Scalar>(m, n);
    dict.delay_step = step;
    dict.column_norms.assign(n, 0.0);
    dict.origin = DictionaryOrigin::synthesized_chirp;
    dict.chirp = spec;

    for (std::size_t i = 0; i < n; ++i) {
        const double tau = static_cast<double>(i) * step;
        double norm2 = 0.0;
        for (std::size_t t = 0; t < m; ++t) {
            const std::complex<double> v = detail::chirp_sample(spec, static_cast<double>(t) - tau);
            Scalar entry;
            if constexpr (is_complex_v<Scalar>) {
                entry = v;
            } else {
                entry = v.real();
            }
            dict.entries(t, i) = entry;
            const double mag = scalar_abs(entry);
            norm2 += mag * mag;
        }
        const double norm = std::sqrt(norm2);
        if (norm <= 0.0)
            throw domain_error("build_chirp_dictionary: column " + std::to_string(i) + " is zero");
        for (std::size_t t = 0; t < m; ++t) dict.entries(t, i) /= Scalar{norm};
        dict.column_norms[i] = 1.0;
    }
    return dict;
}

inline AnyDictionary build_dictionary(const ChirpSpec& spec, std::size_t m, std::size_t n) {
    if (spec.complex_valued) return build_chirp_dictionary<std::complex<double>>(spec, m, n);
    return build_chirp_dictionary<double>(spec, m, n);
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_entry(double v) { return format_double(v); }

inline std::string format_entry(const std::complex<double>& v) {
    // re<sign>|im|j with 17 significant digits on both parts.
    std::string out = format_double(v.real());
    const double im = v.imag();
    if (std::signbit(im)) {
        out += '-';
        out += format_double(-im);
    } else {
        out += '+';
        out += format_double(im);
    }
    out += 'j';
    return out;
}

inline double parse_double_strict(const std::string& text, const char* what) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + text.size() || text.empty())
        throw io_error(std::string("dictionary file: malformed ") + what + " '" + text + "'");
    return v;
}

inline std::complex<double> parse_complex_entry(const std::string& text) {
    if (text.empty() || text.back() != 'j')
        throw io_error("dictionary file: expected complex entry, got '" + text + "'");
    const std::string body = text.substr(0, text.size() - 1);
    // The imaginary part starts at the last +/- not belonging to an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        const char c = body[i];
        if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string::npos)
        throw io_error("dictionary file: complex entry missing imaginary part in '" + text + "'");
    const double re = parse_double_strict(body.substr(0, split), "real part");
    const double im = parse_double_strict(body.substr(split), "imaginary part");
    return {re, im};
}

}  // namespace detail

template <typename Scalar>
void save_dictionary(const Dictionary<Scalar>& dict, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("save_dictionary: cannot open '" + path.string() + "' for writing");
    out << "sparsedet-dict v1\n";
    out << "M=" << dict.rows_m() << " N=" << dict.cols_n()
        << " field=" << (is_complex_v<Scalar> ? "complex" : "real")
        << " delay_step=" << detail::format_double(dict.delay_step)
        << " L=" << detail::format_double(dict.chirp.length_l)
        << " B=" << detail::format_double(dict.chirp.bandwidth_b) << "\n";
    for (std::size_t r = 0; r < dict.rows_m(); ++r) {
        for (std::size_t c = 0; c < dict.cols_n(); ++c) {
            if (c) out << ',';
            out << detail::format_entry(dict.entries(r, c));
        }
        out << '\n';
    }
    if (!out) throw io_error("save_dictionary: write failed for '" + path.string() + "'");
}

inline void save_dictionary(const AnyDictionary& dict, const std::filesystem::path& path) {
    std::visit([&](const auto& d) { save_dictionary(d, path); }, dict);
}

inline AnyDictionary load_dictionary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("load_dictionary: cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line) || line != "sparsedet-dict v1")
        throw io_error("load_dictionary: malformed header line 1 (expected 'sparsedet-dict v1')");
    if (!std::getline(in, line)) throw io_error("load_dictionary: missing header line 2");

    std::size_t m = 0, n = 0;
    bool complex_field = false;
    double delay_step = 0.0, length_l = 0.0, bandwidth_b = 0.0;
    bool saw_m = false, saw_n = false, saw_field = false, saw_step = false, saw_l = false, saw_b = false;
    std::istringstream header(line);
    std::string token;
    while (header >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw io_error("load_dictionary: malformed header token '" + token + "'");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "M") {
            m = static_cast<std::size_t>(detail::parse_double_strict(value, "M"));
            saw_m = true;
        } else if (key == "N") {
            n = static_cast<std::size_t>(detail::parse_double_strict(value, "N"));
            saw_n = true;
        } else if (key == "field") {
            if (value == "complex") complex_field = true;
            else if (value == "real") complex_field = false;
            else throw io_error("load_dictionary: unknown field tag '" + value + "'");
            saw_field = true;
        } else if (key == "delay_step") {
            delay_step = detail::parse_double_strict(value, "delay_step");
            saw_step = true;
        } else if (key == "L") {
            length_l = detail::parse_double_strict(value, "L");
            saw_l = true;
        } else if (key == "B") {
            bandwidth_b = detail::parse_double_strict(value, "B");
            saw_b = true;
        } else {
            throw io_error("load_dictionary: unknown header key '" + key + "'");
        }
    }
    if (!(saw_m && saw_n && saw_field && saw_step && saw_l && saw_b))
        throw io_error("load_dictionary: header line 2 is missing required keys");
    if (m == 0 || n == 0) throw io_error("load_dictionary: M and N must be positive");
    if (!(delay_step > 0.0)) throw io_error("load_dictionary: delay_step must be positive");

    const auto read_rows = [&](auto& dict) {
        using Entry = std::decay_t<decltype(dict.entries(0, 0))>;
        dict.entries = DenseMatrix<Entry>(m, n);
        std::size_t row = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (row >= m) throw io_error("load_dictionary: dimension mismatch (more than M data rows)");
            std::size_t col = 0;
            std::size_t begin = 0;
            while (begin <= line.size()) {
                const std::size_t comma = line.find(',', begin);
                const std::string field = line.substr(begin, comma == std::string::npos ? std::string::npos
                                                                                        : comma - begin);
                if (col >= n) throw io_error("load_dictionary: dimension mismatch (more than N entries in a row)");
                Entry value;
                if constexpr (is_complex_v<Entry>) {
                    value = detail::parse_complex_entry(field);
                } else {
                    value = detail::parse_double_strict(field, "entry");
                }
                if (!std::isfinite(scalar_abs(value)))
                    throw io_error("load_dictionary: non-finite entry '" + field + "'");
                dict.entries(row, col) = value;
                ++col;
                if (comma == std::string::npos) break;
                begin = comma + 1;
            }
            if (col != n) throw io_error("load_dictionary: dimension mismatch (row has " +
                                         std::to_string(col) + " entries, expected " + std::to_string(n) + ")");
            ++row;
        }
        if (row != m) throw io_error("load_dictionary: dimension mismatch (file has " + std::to_string(row) +
                                     " data rows, expected " + std::to_string(m) + ")");
        dict.delay_step = delay_step;
        dict.origin = DictionaryOrigin::loaded_from_file;
        dict.chirp = ChirpSpec{length_l, bandwidth_b, is_complex_v<Entry>};
        dict.column_norms.assign(n, 0.0);
        for (std::size_t c = 0; c < n; ++c) {
            double norm2 = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                const double mag = scalar_abs(dict.entries(r, c));
                norm2 += mag * mag;
            }
            dict.column_norms[c] = std::sqrt(norm2);
        }
    };

    if (complex_field) {
        ComplexDictionary dict;
        read_rows(dict);
        return dict;
    }
    RealDictionary dict;
    read_rows(dict);
    return dict;
}

// Short content tag used by measurement records to reference a dictionary.
template <typename Scalar>
std::string dictionary_id(const Dictionary<Scalar>& dict) {
    std::string id = "chirp:M=" + std::to_string(dict.rows_m()) + ",N=" + std::to_string(dict.cols_n()) +
                     ",L=" + detail::format_double(dict.chirp.length_l) +
                     ",B=" + detail::format_double(dict.chirp.bandwidth_b) +
                     (is_complex_v<Scalar> ? ",complex" : ",real");
    return id;
}

}  // namespace sparsedet
