#pragma once

// Experiment configuration: the TOML subset reader used for config files
// (sections, key = value, scalars and flat arrays, '#' comments) and the
// ExperimentConfig it populates. The bundled configs/paper.toml encodes the
// reference chirp setup: M = 108, N = 250, L = 25, targets 100/104/133,
// SNRs 19..33 dB, p = 0.1, 100 trials per cell.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sparsedet/dictionary.hpp"
#include "sparsedet/scene.hpp"

namespace sparsedet {

namespace toml_lite {

struct Value {
    enum class Kind { boolean, integer, floating, text, array };
    Kind kind = Kind::integer;
    bool b = false;
    std::int64_t i = 0;
    double f = 0.0;
    std::string s;
    std::vector<Value> items;

    double as_double(const std::string& key) const {
        if (kind == Kind::floating) return f;
        if (kind == Kind::integer) return static_cast<double>(i);
        throw io_error("config: key '" + key + "' must be a number");
    }
    std::int64_t as_int(const std::string& key) const {
        if (kind == Kind::integer) return i;
        throw io_error("config: key '" + key + "' must be an integer");
    }
    bool as_bool(const std::string& key) const {
        if (kind == Kind::boolean) return b;
        throw io_error("config: key '" + key + "' must be a boolean");
    }
    const std::string& as_string(const std::string& key) const {
        if (kind == Kind::text) return s;
        throw io_error("config: key '" + key + "' must be a string");
    }
    std::vector<double> as_double_array(const std::string& key) const {
        if (kind != Kind::array) throw io_error("config: key '" + key + "' must be an array");
        std::vector<double> out;
        for (const Value& v : items) out.push_back(v.as_double(key));
        return out;
    }
    std::vector<std::int64_t> as_int_array(const std::string& key) const {
        if (kind != Kind::array) throw io_error("config: key '" + key + "' must be an array");
        std::vector<std::int64_t> out;
        for (const Value& v : items) out.push_back(v.as_int(key));
        return out;
    }
};

using Table = std::map<std::string, Value>;

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

inline Value parse_scalar(const std::string& text, int line_no) {
    const std::string t = strip(text);
    if (t.empty()) throw io_error("config line " + std::to_string(line_no) + ": empty value");
    Value v;
    if (t == "true" || t == "false") {
        v.kind = Value::Kind::boolean;
        v.b = (t == "true");
        return v;
    }
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') {
        v.kind = Value::Kind::text;
        v.s = t.substr(1, t.size() - 2);
        return v;
    }
    bool integral = true;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const char c = t[i];
        if (!(std::isdigit(static_cast<unsigned char>(c)) || ((c == '+' || c == '-') && i == 0))) {
            integral = false;
            break;
        }
    }
    const char* begin = t.c_str();
    char* end = nullptr;
    if (integral) {
        v.kind = Value::Kind::integer;
        v.i = std::strtoll(begin, &end, 10);
    } else {
        v.kind = Value::Kind::floating;
        v.f = std::strtod(begin, &end);
    }
    if (end != begin + t.size())
        throw io_error("config line " + std::to_string(line_no) + ": malformed value '" + t + "'");
    return v;
}

inline Value parse_value(const std::string& text, int line_no) {
    const std::string t = strip(text);
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']')
            throw io_error("config line " + std::to_string(line_no) + ": unterminated array");
        Value v;
        v.kind = Value::Kind::array;
        const std::string inner = t.substr(1, t.size() - 2);
        std::size_t begin = 0;
        bool any = false;
        for (std::size_t i = 0; i <= inner.size(); ++i) {
            if (i == inner.size() || inner[i] == ',') {
                const std::string piece = strip(inner.substr(begin, i - begin));
                if (!piece.empty()) {
                    v.items.push_back(parse_scalar(piece, line_no));
                    any = true;
                } else if (i != inner.size() || any) {
                    if (i != inner.size())
                        throw io_error("config line " + std::to_string(line_no) + ": empty array element");
                }
                begin = i + 1;
            }
        }
        return v;
    }
    return parse_scalar(t, line_no);
}

}  // namespace detail

inline Table parse(std::istream& in) {
    Table table;
    std::string prefix;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = detail::strip(detail::strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw io_error("config line " + std::to_string(line_no) + ": malformed section header");
            prefix = detail::strip(body.substr(1, body.size() - 2));
            if (prefix.empty())
                throw io_error("config line " + std::to_string(line_no) + ": empty section name");
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw io_error("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::strip(body.substr(0, eq));
        if (key.empty())
            throw io_error("config line " + std::to_string(line_no) + ": empty key");
        const std::string full_key = prefix.empty() ? key : prefix + "." + key;
        if (table.contains(full_key))
            throw io_error("config line " + std::to_string(line_no) + ": duplicate key '" + full_key + "'");
        table[full_key] = detail::parse_value(body.substr(eq + 1), line_no);
    }
    return table;
}

inline Table parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("config: cannot open '" + path.string() + "'");
    return parse(in);
}

}  // namespace toml_lite

enum class GammaSource { computed, supplied };

struct ExperimentConfig {
    std::size_t dict_m = 108;
    std::size_t dict_n = 250;
    ChirpSpec chirp{25.0, 1.0, true};

    std::vector<std::size_t> positions{100, 104, 133};  // 1-based master list
    std::vector<double> amplitudes{1.0, 1.0, 1.0};
    std::vector<std::size_t> k_values{1, 2, 3};  // per-K scenes are prefixes

    std::vector<double> snr_db{19.0, 22.0, 25.0, 28.0, 31.0, 33.0};
    double failure_p = 0.1;
    std::size_t trials_per_cell = 100;
    std::uint64_t master_seed = 1;
    GammaSource gamma_source = GammaSource::supplied;
    std::vector<double> supplied_gammas{0.8272, 0.8332, 0.8338};
    double truncation_ratio = 0.1;

    NoiseFamily noise_family = NoiseFamily::gaussian;
    VarianceConvention variance_convention = VarianceConvention::total;
};

// The bundled reference setup (identical to configs/paper.toml).
inline ExperimentConfig paper_experiment_config() { return ExperimentConfig{}; }

inline void validate_experiment_config(const ExperimentConfig& c) {
    if (c.dict_n == 0 || c.dict_m == 0) throw io_error("config: dictionary dimensions must be positive");
    if (static_cast<double>(c.dict_m) <= c.chirp.length_l)
        throw io_error("config: dictionary M must exceed the chirp length");
    if (c.positions.empty()) throw io_error("config: scenario.positions must be nonempty");
    if (c.positions.size() != c.amplitudes.size())
        throw io_error("config: scenario.amplitudes must align with scenario.positions");
    for (std::size_t p : c.positions) {
        if (p < 1 || p > c.dict_n) throw io_error("config: target positions must lie in [1, N]");
    }
    for (double a : c.amplitudes) {
        if (a == 0.0) throw io_error("config: target amplitudes must be nonzero");
    }
    if (c.k_values.empty()) throw io_error("config: scenario.k_values must be nonempty");
    for (std::size_t k : c.k_values) {
        if (k == 0 || k > c.positions.size())
            throw io_error("config: every K must index a prefix of scenario.positions");
    }
    if (c.snr_db.empty()) throw io_error("config: snr_db must be nonempty");
    if (!(c.failure_p > 0.0 && c.failure_p < 1.0))
        throw io_error("config: failure_p must lie in (0, 1)");
    if (c.trials_per_cell == 0) throw io_error("config: trials_per_cell must be at least 1");
    if (c.truncation_ratio < 0.0 || c.truncation_ratio >= 1.0)
        throw io_error("config: truncation_ratio must lie in [0, 1)");
    if (c.gamma_source == GammaSource::supplied && c.supplied_gammas.size() != c.k_values.size())
        throw io_error("config: supplied_gammas must align with k_values");
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    const toml_lite::Table t = toml_lite::parse_file(path);
    ExperimentConfig c;

    const auto get = [&](const std::string& key) -> const toml_lite::Value* {
        const auto it = t.find(key);
        return it == t.end() ? nullptr : &it->second;
    };
    const auto require = [&](const std::string& key) -> const toml_lite::Value& {
        const auto* v = get(key);
        if (!v) throw io_error("config: missing required key '" + key + "'");
        return *v;
    };
    const auto size_array = [&](const std::string& key) {
        std::vector<std::size_t> out;
        for (std::int64_t v : require(key).as_int_array(key)) {
            if (v < 0) throw io_error("config: key '" + key + "' must hold nonnegative integers");
            out.push_back(static_cast<std::size_t>(v));
        }
        return out;
    };

    c.dict_m = static_cast<std::size_t>(require("dictionary.m").as_int("dictionary.m"));
    c.dict_n = static_cast<std::size_t>(require("dictionary.n").as_int("dictionary.n"));
    c.chirp.length_l = require("dictionary.chirp_length").as_double("dictionary.chirp_length");
    c.chirp.bandwidth_b = require("dictionary.chirp_bandwidth").as_double("dictionary.chirp_bandwidth");
    c.chirp.complex_valued = require("dictionary.complex").as_bool("dictionary.complex");

    c.positions = size_array("scenario.positions");
    c.amplitudes = require("scenario.amplitudes").as_double_array("scenario.amplitudes");
    c.k_values = size_array("scenario.k_values");

    c.snr_db = require("snr_db").as_double_array("snr_db");
    c.failure_p = require("failure_p").as_double("failure_p");
    c.trials_per_cell = static_cast<std::size_t>(require("trials_per_cell").as_int("trials_per_cell"));
    c.master_seed = static_cast<std::uint64_t>(require("master_seed").as_int("master_seed"));

    const std::string source = require("gamma_source").as_string("gamma_source");
    if (source == "computed") c.gamma_source = GammaSource::computed;
    else if (source == "supplied") c.gamma_source = GammaSource::supplied;
    else throw io_error("config: gamma_source must be 'computed' or 'supplied'");
    if (const auto* v = get("supplied_gammas")) c.supplied_gammas = v->as_double_array("supplied_gammas");
    else c.supplied_gammas.clear();

    c.truncation_ratio = require("truncation_ratio").as_double("truncation_ratio");

    const std::string family = require("noise.family").as_string("noise.family");
    if (family == "gaussian") c.noise_family = NoiseFamily::gaussian;
    else if (family == "rademacher") c.noise_family = NoiseFamily::rademacher;
    else if (family == "uniform") c.noise_family = NoiseFamily::uniform;
    else throw io_error("config: noise.family must be gaussian, rademacher or uniform");

    const std::string convention = require("noise.variance_convention").as_string("noise.variance_convention");
    if (convention == "total") c.variance_convention = VarianceConvention::total;
    else if (convention == "per_component") c.variance_convention = VarianceConvention::per_component;
    else throw io_error("config: noise.variance_convention must be 'total' or 'per_component'");

    validate_experiment_config(c);
    return c;
}

// SPARSEDET_SEED, when set, overrides the config master seed.
inline void apply_seed_override(ExperimentConfig& c) {
    const char* env = std::getenv("SPARSEDET_SEED");
    if (!env || !*env) return;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
        throw io_error("SPARSEDET_SEED must be an unsigned integer");
    c.master_seed = static_cast<std::uint64_t>(v);
}

}  // namespace sparsedet
