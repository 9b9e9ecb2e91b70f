#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wellpose::cheb {

/// First-kind points x_k = cos(pi (k + 1/2) / n), k = 0..n-1 (descending).
std::vector<double> first_kind_points(std::size_t n);

/// Coefficients c_j of sum_j c_j T_j(x) interpolating values at first_kind_points(n).
/// c_0 is already halved, so clenshaw() sums all terms with unit weight.
std::vector<double> first_kind_coefficients(std::span<const double> values);
std::vector<std::complex<double>> first_kind_coefficients(std::span<const std::complex<double>> values);

/// Lobatto points x_j = cos(pi j / n), j = 0..n (n + 1 points, x_0 = 1).
std::vector<double> lobatto_points(std::size_t n);

/// Coefficients of the degree-n interpolant through values at lobatto_points(n).
std::vector<std::complex<double>> lobatto_coefficients(std::span<const std::complex<double>> values);

/// Differentiation matrix on lobatto_points(n), row-major (n+1) x (n+1). Cached per n.
const std::vector<double>& lobatto_diff_matrix(std::size_t n);

template <class T>
T clenshaw(std::span<const T> c, double x)
{
    T b1{}, b2{};
    for (std::size_t j = c.size(); j-- > 1;) {
        const T b0 = c[j] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c.empty() ? T{} : c[0] + x * b1 - b2;
}

/// Magnitude of the last two coefficients; the usual resolution indicator.
template <class T>
double tail(std::span<const T> c)
{
    const std::size_t n = c.size();
    if (n < 2) return 0.0;
    return std::abs(c[n - 1]) + std::abs(c[n - 2]);
}

}  // namespace wellpose::cheb
