#include "wellpose/levin.hpp"

#include <cmath>

namespace wellpose::osc::detail {

bool levin_solve(std::size_t n, double half_width, std::span<const double> rates,
                 std::span<std::complex<double>> rhs, std::size_t columns)
{
    const std::size_t m = n + 1;
    const auto& d = cheb::lobatto_diff_matrix(n);
    thread_local std::vector<std::complex<double>> a;
    a.assign(m * m, {});
    const double scale = 1.0 / half_width;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) a[i * m + j] = d[i * m + j] * scale;
        a[i * m + i] += std::complex<double>(0.0, rates[i]);
    }

    // Gaussian elimination with partial pivoting, all right-hand sides at once.
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        double best = std::abs(a[col * m + col]);
        for (std::size_t r = col + 1; r < m; ++r) {
            const double v = std::abs(a[r * m + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (!(best > 0.0) || !std::isfinite(best)) return false;
        if (piv != col) {
            for (std::size_t j = 0; j < m; ++j) std::swap(a[col * m + j], a[piv * m + j]);
            for (std::size_t k = 0; k < columns; ++k) std::swap(rhs[k * m + col], rhs[k * m + piv]);
        }
        const std::complex<double> inv = 1.0 / a[col * m + col];
        for (std::size_t r = col + 1; r < m; ++r) {
            const std::complex<double> f = a[r * m + col] * inv;
            if (f == std::complex<double>{}) continue;
            for (std::size_t j = col; j < m; ++j) a[r * m + j] -= f * a[col * m + j];
            for (std::size_t k = 0; k < columns; ++k) rhs[k * m + r] -= f * rhs[k * m + col];
        }
    }
    for (std::size_t k = 0; k < columns; ++k) {
        for (std::size_t r = m; r-- > 0;) {
            std::complex<double> s = rhs[k * m + r];
            for (std::size_t j = r + 1; j < m; ++j) s -= a[r * m + j] * rhs[k * m + j];
            rhs[k * m + r] = s / a[r * m + r];
        }
    }
    for (std::size_t i = 0; i < m * columns; ++i)
        if (!std::isfinite(rhs[i].real()) || !std::isfinite(rhs[i].imag())) return false;
    return true;
}

}  // namespace wellpose::osc::detail
