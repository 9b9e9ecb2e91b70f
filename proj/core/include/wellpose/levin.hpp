#pragma once

// Oscillatory integrals  I_k = \int_a^b w_k(u) exp(i Phi(u)) du  for a handful of smooth weights
// sharing one monotone phase. Panels with a large phase change are handled by Levin collocation
// (solve p' + i Phi' p = w on Chebyshev-Lobatto points, then I = [p e^{i Phi}]_a^b); panels with a
// small phase change fall back to adaptive Gauss-Legendre.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "wellpose/chebyshev.hpp"
#include "wellpose/quadrature.hpp"

namespace wellpose::osc {

/// Phase Phi and its derivative. Phi' must keep one sign on the integration interval.
struct Phase {
    std::function<double(double)> value;
    std::function<double(double)> rate;
};

struct Options {
    std::size_t levin_degree = 16;  ///< collocation polynomial degree
    double levin_min_phase = 24.0;  ///< radians per panel below which Gauss-Legendre is used
    int max_depth = 60;
    quad::Options gl{};
};

template <std::size_t K>
struct Result {
    std::array<std::complex<double>, K> value{};
    std::array<double, K> error{};
    long levin_panels = 0;
    long evaluations = 0;
    bool converged = true;
};

namespace detail {

/// In-place solve of (D/h + i diag(rate)) P = B for K right-hand sides stored column by column in
/// rhs (each column n+1 long). Returns false when the system is numerically singular.
bool levin_solve(std::size_t n, double half_width, std::span<const double> rates,
                 std::span<std::complex<double>> rhs, std::size_t columns);

}  // namespace detail

template <std::size_t K, class W>
Result<K> integrate(W&& weights, const Phase& phase, double a, double b,
                    const std::array<double, K>& abs_tol, const Options& opt = {})
{
    Result<K> out;
    if (!(b > a)) return out;
    const std::size_t n = opt.levin_degree;
    const auto& x = [&]() -> const std::vector<double>& {
        thread_local std::vector<double> pts;
        thread_local std::size_t cached = 0;
        if (cached != n) {
            pts = cheb::lobatto_points(n);
            cached = n;
        }
        return pts;
    }();
    const double width = b - a;

    struct Item {
        double lo, hi, phi_lo, phi_hi;
        int depth;
    };
    std::vector<Item> stack;
    stack.push_back({a, b, phase.value(a), phase.value(b), 0});

    std::vector<double> rates(n + 1);
    std::vector<std::complex<double>> rhs((n + 1) * K);

    while (!stack.empty()) {
        const Item it = stack.back();
        stack.pop_back();
        const double share = (it.hi - it.lo) / width;
        std::array<double, K> tol{};
        for (std::size_t k = 0; k < K; ++k) tol[k] = abs_tol[k] * share;

        auto split = [&]() {
            const double mid = 0.5 * (it.lo + it.hi);
            const double phi_mid = phase.value(mid);
            stack.push_back({mid, it.hi, phi_mid, it.phi_hi, it.depth + 1});
            stack.push_back({it.lo, mid, it.phi_lo, phi_mid, it.depth + 1});
        };

        if (std::abs(it.phi_hi - it.phi_lo) < opt.levin_min_phase) {
            std::array<double, 2 * K> gl_tol{};
            for (std::size_t k = 0; k < K; ++k) gl_tol[2 * k] = gl_tol[2 * k + 1] = tol[k] / std::sqrt(2.0);
            const auto r = quad::integrate<2 * K>(
                [&](double u) {
                    const auto w = weights(u);
                    const double ph = phase.value(u);
                    const double c = std::cos(ph), s = std::sin(ph);
                    std::array<double, 2 * K> v{};
                    for (std::size_t k = 0; k < K; ++k) {
                        v[2 * k] = w[k] * c;
                        v[2 * k + 1] = w[k] * s;
                    }
                    return v;
                },
                it.lo, it.hi, gl_tol, opt.gl);
            out.evaluations += r.evaluations;
            out.converged = out.converged && r.converged;
            for (std::size_t k = 0; k < K; ++k) {
                out.value[k] += std::complex<double>(r.value[2 * k], r.value[2 * k + 1]);
                out.error[k] += r.error[2 * k] + r.error[2 * k + 1];
            }
            continue;
        }

        const double c = 0.5 * (it.lo + it.hi), h = 0.5 * (it.hi - it.lo);
        for (std::size_t j = 0; j <= n; ++j) {
            const double u = c + h * x[j];
            rates[j] = phase.rate(u);
            const auto w = weights(u);
            for (std::size_t k = 0; k < K; ++k) rhs[k * (n + 1) + j] = w[k];
        }
        out.evaluations += static_cast<long>(n + 1);
        const bool solved = detail::levin_solve(n, h, rates, rhs, K);

        bool ok = solved;
        std::array<double, K> err{};
        if (solved) {
            for (std::size_t k = 0; k < K && ok; ++k) {
                const std::span<const std::complex<double>> col(rhs.data() + k * (n + 1), n + 1);
                const auto coef = cheb::lobatto_coefficients(col);
                err[k] = 2.0 * cheb::tail<std::complex<double>>(coef);
                if (!(err[k] <= tol[k])) ok = false;
            }
        }
        if (!ok && it.depth < opt.max_depth) {
            split();
            continue;
        }
        if (!ok) out.converged = false;
        const std::complex<double> e_hi = std::polar(1.0, it.phi_hi), e_lo = std::polar(1.0, it.phi_lo);
        for (std::size_t k = 0; k < K; ++k) {
            // x_0 = +1 maps to hi, x_n = -1 maps to lo
            out.value[k] += rhs[k * (n + 1)] * e_hi - rhs[k * (n + 1) + n] * e_lo;
            out.error[k] += err[k];
        }
        ++out.levin_panels;
    }
    return out;
}

}  // namespace wellpose::osc
