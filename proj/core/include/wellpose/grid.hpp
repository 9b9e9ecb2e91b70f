#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "wellpose/error.hpp"

namespace wellpose {

/// n points from lo to hi inclusive, uniformly spaced.
inline std::vector<double> lin_space(double lo, double hi, std::size_t n)
{
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

/// n points from lo to hi inclusive, uniformly spaced in log. Requires 0 < lo <= hi.
inline std::vector<double> log_space(double lo, double hi, std::size_t n)
{
    if (!(lo > 0.0) || !(hi >= lo)) throw DomainError("log_space: need 0 < lo <= hi");
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double a = std::log(lo), b = std::log(hi);
    const double step = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace wellpose
