#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace sparsedet {

// Library errors split by exit-code class: domain_error -> 1, io_error -> 3.
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};
template <typename T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <typename T>
struct real_of {
    using type = T;
};
template <typename T>
struct real_of<std::complex<T>> {
    using type = T;
};
template <typename T>
using real_of_t = typename real_of<T>::type;

// std::conj(double) would promote to complex; this keeps the field.
template <typename T>
constexpr T scalar_conj(const T& v) {
    if constexpr (is_complex_v<T>) {
        return std::conj(v);
    } else {
        return v;
    }
}

template <typename T>
constexpr real_of_t<T> scalar_abs(const T& v) {
    using std::abs;
    return abs(v);
}

}  // namespace sparsedet
