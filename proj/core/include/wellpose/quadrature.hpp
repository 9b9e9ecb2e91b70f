#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace wellpose::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Rule with n points, computed by Newton iteration on P_n. Cached per n.
const GaussLegendreRule& gauss_legendre(int n);

template <std::size_t K>
struct Result {
    std::array<double, K> value{};
    std::array<double, K> error{};
    long evaluations = 0;
    bool converged = true;
};

struct Options {
    int order = 10;      ///< Gauss-Legendre points per panel
    int max_depth = 52;  ///< bisection depth limit
};

/// Adaptive Gauss-Legendre for a vector-valued integrand f: double -> std::array<double, K>.
///
/// Each panel is estimated with the n-point rule on the whole and on both halves; the halves are
/// kept when |whole - halves| is below the panel's share of abs_tol (share proportional to width).
template <std::size_t K, class F>
Result<K> integrate(F&& f, double a, double b, const std::array<double, K>& abs_tol,
                    const Options& opt = {})
{
    Result<K> out;
    if (!(b > a)) return out;
    const auto& rule = gauss_legendre(opt.order);
    const std::size_t n = rule.nodes.size();

    auto panel = [&](double lo, double hi) {
        std::array<double, K> s{};
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < n; ++i) {
            const auto v = f(c + h * rule.nodes[i]);
            for (std::size_t k = 0; k < K; ++k) s[k] += rule.weights[i] * v[k];
        }
        for (auto& x : s) x *= h;
        out.evaluations += static_cast<long>(n);
        return s;
    };

    struct Item {
        double lo, hi;
        std::array<double, K> whole;
        int depth;
    };
    const double width = b - a;
    std::vector<Item> stack;
    stack.reserve(64);
    stack.push_back({a, b, panel(a, b), 0});
    constexpr double eps = std::numeric_limits<double>::epsilon();

    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (it.lo + it.hi);
        const auto left = panel(it.lo, mid);
        const auto right = panel(mid, it.hi);
        const double share = (it.hi - it.lo) / width;
        bool ok = true;
        std::array<double, K> err{};
        for (std::size_t k = 0; k < K; ++k) {
            const double refined = left[k] + right[k];
            err[k] = std::abs(it.whole[k] - refined);
            const double floor = 64.0 * eps * (std::abs(left[k]) + std::abs(right[k]));
            if (err[k] > std::max(abs_tol[k] * share, floor)) ok = false;
        }
        const bool tiny = (it.hi - it.lo) <= 16.0 * eps * std::max(std::abs(it.lo), std::abs(it.hi));
        if (ok || it.depth >= opt.max_depth || tiny) {
            if (!ok) out.converged = false;
            for (std::size_t k = 0; k < K; ++k) {
                out.value[k] += left[k] + right[k];
                out.error[k] += err[k];
            }
        } else {
            stack.push_back({mid, it.hi, right, it.depth + 1});
            stack.push_back({it.lo, mid, left, it.depth + 1});
        }
    }
    return out;
}

/// Scalar convenience wrapper around integrate<1>.
template <class F>
Result<1> integrate_scalar(F&& f, double a, double b, double abs_tol, const Options& opt = {})
{
    return integrate<1>([&](double x) { return std::array<double, 1>{f(x)}; }, a, b,
                        std::array<double, 1>{abs_tol}, opt);
}

/// Fixed n-point Gauss-Legendre on [a, b].
template <class F>
double fixed(F&& f, double a, double b, int n)
{
    const auto& rule = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(c + h * rule.nodes[i]);
    return s * h;
}

}  // namespace wellpose::quad
