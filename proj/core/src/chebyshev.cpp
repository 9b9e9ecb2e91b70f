#include "wellpose/chebyshev.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace wellpose::cheb {

using std::numbers::pi;

std::vector<double> first_kind_points(std::size_t n)
{
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = std::cos(pi * (static_cast<double>(k) + 0.5) / static_cast<double>(n));
    return x;
}

namespace {

// Row-major transform matrices, cached per size. kind 0: first-kind (DCT-II), kind 1: Lobatto (DCT-I).
const std::vector<double>& transform(std::size_t m, int kind)
{
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, int>, std::vector<double>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find({m, kind});
    if (it != cache.end()) return it->second;
    std::vector<double> t(m * m);
    if (kind == 0) {
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                t[j * m + k] = (j == 0 ? 1.0 : 2.0) / static_cast<double>(m) *
                               std::cos(pi * static_cast<double>(j) * (static_cast<double>(k) + 0.5) / static_cast<double>(m));
    } else {
        const std::size_t n = m - 1;
        for (std::size_t k = 0; k <= n; ++k)
            for (std::size_t j = 0; j <= n; ++j) {
                const double w = (j == 0 || j == n) ? 0.5 : 1.0;
                const double edge = (k == 0 || k == n) ? 0.5 : 1.0;
                t[k * m + j] = edge * w * (2.0 / static_cast<double>(n)) *
                               std::cos(pi * static_cast<double>(k * j) / static_cast<double>(n));
            }
    }
    return cache.emplace(std::make_pair(m, kind), std::move(t)).first->second;
}

template <class T>
std::vector<T> apply(std::span<const T> v, int kind)
{
    const std::size_t m = v.size();
    const auto& t = transform(m, kind);
    std::vector<T> c(m);
    for (std::size_t j = 0; j < m; ++j) {
        T s{};
        for (std::size_t k = 0; k < m; ++k) s += t[j * m + k] * v[k];
        c[j] = s;
    }
    return c;
}

}  // namespace

std::vector<double> first_kind_coefficients(std::span<const double> values) { return apply(values, 0); }

std::vector<std::complex<double>> first_kind_coefficients(std::span<const std::complex<double>> values)
{
    return apply(values, 0);
}

std::vector<double> lobatto_points(std::size_t n)
{
    std::vector<double> x(n + 1);
    for (std::size_t j = 0; j <= n; ++j) x[j] = std::cos(pi * static_cast<double>(j) / static_cast<double>(n));
    return x;
}

std::vector<std::complex<double>> lobatto_coefficients(std::span<const std::complex<double>> values)
{
    return apply(values, 1);
}

const std::vector<double>& lobatto_diff_matrix(std::size_t n)
{
    static std::mutex mutex;
    static std::map<std::size_t, std::vector<double>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    const auto x = lobatto_points(n);
    const std::size_t m = n + 1;
    std::vector<double> d(m * m, 0.0);
    auto c = [&](std::size_t i) { return ((i == 0 || i == n) ? 2.0 : 1.0) * ((i % 2) ? -1.0 : 1.0); };
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            d[i * m + j] = c(i) / c(j) / (x[i] - x[j]);
            row += d[i * m + j];
        }
        d[i * m + i] = -row;  // negative-sum trick keeps D * 1 = 0 exactly
    }
    return cache.emplace(n, std::move(d)).first->second;
}

}  // namespace wellpose::cheb
