#include "wellpose/surrogate.hpp"

#include <algorithm>
#include <cmath>

#include "wellpose/chebyshev.hpp"
#include "wellpose/error.hpp"

namespace wellpose {

CoefficientSurrogate::CoefficientSurrogate(const MollifiedCoefficient& mc, double t_lo, double t_hi,
                                           const SurrogateOptions& opt)
    : n_(mc.field().n), funcs_(mc.field().entries), t_lo_(t_lo), t_hi_(t_hi), opt_(opt)
{
    if (!(t_hi > t_lo)) throw DomainError("surrogate: need t_lo < t_hi");
    if (opt.degree < 4) throw DomainError("surrogate: degree must be at least 4");
    entries_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i; j < n_; ++j) build(mc, i * n_ + j, entries_[i * n_ + j]);
}

void CoefficientSurrogate::build(const MollifiedCoefficient& mc, std::size_t k, Entry& e)
{
    const ScalarFunction& f = funcs_[k];
    e.active = true;
    if (f.kind() == ScalarFunction::Kind::Constant) {
        e.constant = true;
        e.c = f.mean();
        return;
    }
    const double eps = mc.eps(), T = mc.field().T;
    const bool osc = f.oscillatory() && f.amplitude() != 0.0;
    const double A = osc ? std::abs(f.amplitude()) : 1.0;
    const double tol_v = opt_.tol, tol_d = opt_.tol / eps;
    const std::size_t m = opt_.degree + 1;
    const auto x = cheb::first_kind_points(m);

    auto fit = [&](double lo, double hi, bool modulated, Panel& p) {
        p.lo = lo;
        p.hi = hi;
        p.modulated = modulated;
        std::vector<std::complex<double>> v(m), d(m);
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (std::size_t j = 0; j < m; ++j) {
            const double t = c + h * x[j];
            if (modulated) {
                const auto J = mc.phase_integrals(k, t);
                const auto rot = std::polar(1.0, -f.phase(t));
                v[j] = rot * J[0];
                d[j] = rot * J[1];
            } else {
                const auto s = mc.entry(k, t);
                v[j] = s.value;
                d[j] = s.derivative;
            }
        }
        evaluations_ += static_cast<long>(m);
        p.value = cheb::first_kind_coefficients(std::span<const std::complex<double>>(v));
        p.deriv = cheb::first_kind_coefficients(std::span<const std::complex<double>>(d));
        const double scale = modulated ? A : 1.0;
        return scale * cheb::tail<std::complex<double>>(p.value) <= tol_v &&
               scale * cheb::tail<std::complex<double>>(p.deriv) <= tol_d;
    };

    // segments: clamped zone near 0, unclamped interior, clamped zone near T
    std::vector<double> cuts{t_lo_, t_hi_};
    for (double b : {2.0 * eps, T - eps})
        if (b > t_lo_ && b < t_hi_) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    struct Item {
        double lo, hi;
        bool modulated;
        int depth;
    };
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double lo = cuts[s], hi = cuts[s + 1];
        const bool modulated = osc && lo >= 2.0 * eps * (1.0 - 1e-14) && hi <= T - eps * (1.0 - 1e-14);
        std::vector<double> starts{lo};
        if (modulated)
            for (double b = 2.0 * lo; b < hi; b *= 2.0) starts.push_back(b);
        starts.push_back(hi);
        // depth-first with the right half pushed first, so panels come out in ascending order
        std::vector<Item> stack;
        for (std::size_t q = starts.size() - 1; q-- > 0;) stack.push_back({starts[q], starts[q + 1], modulated, 0});
        while (!stack.empty()) {
            const Item it = stack.back();
            stack.pop_back();
            Panel p;
            const bool ok = fit(it.lo, it.hi, it.modulated, p);
            if (!ok && it.depth < opt_.max_depth) {
                const double mid = 0.5 * (it.lo + it.hi);
                stack.push_back({mid, it.hi, it.modulated, it.depth + 1});
                stack.push_back({it.lo, mid, it.modulated, it.depth + 1});
                continue;
            }
            if (!ok) converged_ = false;
            e.starts.push_back(p.lo);
            e.panels.push_back(std::move(p));
        }
    }
}

MollifiedCoefficient::Sample CoefficientSurrogate::entry(std::size_t k, double t) const
{
    const Entry& e = entries_.at(k);
    if (!e.active) throw DomainError("surrogate: entry not built");
    if (e.constant) return {e.c, 0.0};
    std::size_t idx = static_cast<std::size_t>(std::upper_bound(e.starts.begin(), e.starts.end(), t) - e.starts.begin());
    idx = idx == 0 ? 0 : idx - 1;
    const Panel& p = e.panels[idx];
    const double x = std::clamp((2.0 * t - p.lo - p.hi) / (p.hi - p.lo), -1.0, 1.0);
    const auto v = cheb::clenshaw<std::complex<double>>(p.value, x);
    const auto d = cheb::clenshaw<std::complex<double>>(p.deriv, x);
    if (!p.modulated) return {v.real(), d.real()};
    const ScalarFunction& f = funcs_[k];
    const auto rot = std::polar(1.0, f.phase(t));
    return {f.mean() + f.amplitude() * (rot * v).imag(), f.amplitude() * (rot * d).imag()};
}

MollifiedCoefficient::Sample CoefficientSurrogate::evaluate(double t, std::span<const double> weights) const
{
    if (n_ == 1) return entry(0, t);
    MollifiedCoefficient::Sample s;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i; j < n_; ++j) {
            const double w = (i == j ? 1.0 : 2.0) * weights[i * n_ + j];
            if (w == 0.0) continue;
            const auto e = entry(i * n_ + j, t);
            s.value += w * e.value;
            s.derivative += w * e.derivative;
        }
    return s;
}

std::size_t CoefficientSurrogate::panels() const
{
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.panels.size();
    return n;
}

}  // namespace wellpose
