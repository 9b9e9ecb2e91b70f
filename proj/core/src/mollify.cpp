#include "wellpose/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wellpose/error.hpp"
#include "wellpose/levin.hpp"
#include "wellpose/parallel.hpp"
#include "wellpose/quadrature.hpp"

namespace wellpose {

namespace {

constexpr int kCdfPanels = 256;
constexpr int kCdfOrder = 24;

double bump_raw(double s)
{
    const double w = (1.0 - s) * (1.0 + s);
    return w > 0.0 ? std::exp(-1.0 / w) : 0.0;
}

double poly_raw(double s, int k)
{
    const double w = (1.0 - s) * (1.0 + s);
    return w > 0.0 ? std::pow(w, k) : 0.0;
}

}  // namespace

namespace {

// Requested accuracy for the value and derivative integrals, floored at what rounding of the kernel
// argument (t - u)/eps allows.
std::array<double, 2> attainable_tolerance(double tol, double eps, double t)
{
    const double floor = 256.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(t) / eps);
    return {std::max(tol, floor), std::max(tol, floor) / eps};
}

double damping_frequency_of(const MollifierKernel& k)
{
    constexpr double level = 1e-9, w_max = 1e4;
    double last_bad = 0.0;
    for (double w = 1.0; w <= w_max; w *= 1.05) {
        // even kernel: the transform is the cosine integral
        const int panels = std::max(4, static_cast<int>(std::ceil(w / 4.0)));
        double ft = 0.0;
        for (int j = 0; j < panels; ++j)
            ft += quad::fixed([&](double s) { return k.rho(s) * std::cos(w * s); }, -1.0 + 2.0 * j / panels,
                              -1.0 + 2.0 * (j + 1) / panels, 32);
        if ((1.0 + w) * std::abs(ft) > level) last_bad = w;
    }
    return last_bad * 1.05 > w_max ? std::numeric_limits<double>::infinity() : last_bad * 1.05;
}

}  // namespace

MollifierKernel MollifierKernel::bump()
{
    static const MollifierKernel cached = [] {
        MollifierKernel k;
        k.profile_ = Profile::Bump;
        const auto r = quad::integrate_scalar(bump_raw, -1.0, 1.0, 1e-16);
        k.norm_ = r.value[0];
        std::vector<double> cum(kCdfPanels + 1, 0.0);
        for (int j = 0; j < kCdfPanels; ++j) {
            const double lo = -1.0 + 2.0 * j / kCdfPanels, hi = -1.0 + 2.0 * (j + 1) / kCdfPanels;
            cum[j + 1] = cum[j] + quad::fixed([&](double s) { return k.rho(s); }, lo, hi, kCdfOrder);
        }
        k.cumulative_ = std::make_shared<const std::vector<double>>(std::move(cum));
        const auto l1 = quad::integrate_scalar([&](double s) { return std::abs(k.drho(s)); }, -1.0, 0.0, 1e-15);
        const auto l2 = quad::integrate_scalar([&](double s) { return std::abs(k.drho(s)); }, 0.0, 1.0, 1e-15);
        k.drho_l1_ = l1.value[0] + l2.value[0];
        k.damping_ = damping_frequency_of(k);
        return k;
    }();
    return cached;
}

MollifierKernel MollifierKernel::polynomial(int degree)
{
    if (degree < 2 || degree > 64) throw ValidationError("polynomial kernel degree must be in [2, 64]");
    MollifierKernel k;
    k.profile_ = Profile::Polynomial;
    k.degree_ = degree;
    // int_{-1}^{1} (1 - s^2)^k ds = sqrt(pi) Gamma(k + 1) / Gamma(k + 3/2)
    k.norm_ = std::exp(0.5 * std::log(std::numbers::pi) + std::lgamma(degree + 1.0) - std::lgamma(degree + 1.5));
    std::vector<double> cum(kCdfPanels + 1, 0.0);
    for (int j = 0; j < kCdfPanels; ++j) {
        const double lo = -1.0 + 2.0 * j / kCdfPanels, hi = -1.0 + 2.0 * (j + 1) / kCdfPanels;
        cum[j + 1] = cum[j] + quad::fixed([&](double s) { return k.rho(s); }, lo, hi, kCdfOrder);
    }
    k.cumulative_ = std::make_shared<const std::vector<double>>(std::move(cum));
    const auto l1 = quad::integrate_scalar([&](double s) { return std::abs(k.drho(s)); }, -1.0, 0.0, 1e-15);
    const auto l2 = quad::integrate_scalar([&](double s) { return std::abs(k.drho(s)); }, 0.0, 1.0, 1e-15);
    k.drho_l1_ = l1.value[0] + l2.value[0];
    k.damping_ = damping_frequency_of(k);
    return k;
}

double MollifierKernel::rho(double s) const
{
    return (profile_ == Profile::Bump ? bump_raw(s) : poly_raw(s, degree_)) / norm_;
}

double MollifierKernel::drho(double s) const
{
    const double w = (1.0 - s) * (1.0 + s);
    if (!(w > 0.0)) return 0.0;
    if (profile_ == Profile::Bump) return bump_raw(s) * (-2.0 * s / (w * w)) / norm_;
    return -2.0 * degree_ * s * std::pow(w, degree_ - 1) / norm_;
}

double MollifierKernel::cdf(double s) const
{
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double pos = (s + 1.0) * 0.5 * kCdfPanels;
    const int j = std::min(kCdfPanels - 1, static_cast<int>(pos));
    const double lo = -1.0 + 2.0 * j / kCdfPanels;
    return (*cumulative_)[static_cast<std::size_t>(j)] + quad::fixed([&](double x) { return rho(x); }, lo, s, kCdfOrder);
}

// ---------------------------------------------------------------------------------------------

double extend(const ScalarFunction& f, double T, double eps, double t)
{
    if (t <= eps) return f(eps);
    if (t >= T) return f(T);
    return f(t);
}

double extend(const CoefficientField& field, double eps, double t, std::span<const double> xi)
{
    if (!(eps > 0.0) || eps > field.tau0()) throw DomainError("extend: eps must lie in ]0, tau0]");
    const double tc = std::clamp(t, eps, field.T);
    return symbol(field, tc, xi);
}

double extend(const CoefficientField& field, double eps, double t)
{
    const double xi = 1.0;
    return extend(field, eps, t, std::span<const double>(&xi, 1));
}

MollifiedCoefficient::MollifiedCoefficient(CoefficientField field, double eps, MollifierKernel kernel, double tol)
    : field_(std::move(field)), eps_(eps), kernel_(std::move(kernel)), tol_(tol)
{
    if (!(eps > 0.0) || eps > field_.tau0()) throw DomainError("mollify: eps must lie in ]0, tau0]");
    if (!(tol > 0.0)) throw DomainError("mollify: tolerance must be positive");
}

MollifiedCoefficient::Sample MollifiedCoefficient::entry(std::size_t k, double t) const
{
    const ScalarFunction& f = field_.entries.at(k);
    const double eps = eps_, T = field_.T;
    const double inv = 1.0 / eps;
    auto rho_e = [&](double s) { return kernel_.rho(s * inv) * inv; };
    auto drho_e = [&](double s) { return kernel_.drho(s * inv) * inv * inv; };
    // kernel mass for u in [lo, hi]
    auto mass = [&](double lo, double hi) { return kernel_.cdf((t - lo) * inv) - kernel_.cdf((t - hi) * inv); };

    Sample out;
    const double w_lo = t - eps, w_hi = t + eps;

    if (f.kind() == ScalarFunction::Kind::Constant) {
        out.value = f.mean();
        return out;
    }

    // left clamp piece, u in [w_lo, eps]
    if (w_lo < eps) {
        const double hi = std::min(eps, w_hi);
        const double c = f(eps);
        out.value += c * mass(w_lo, hi);
        out.derivative += c * (rho_e(t - w_lo) - rho_e(t - hi));
    }
    // right clamp piece, u in [T, w_hi]
    if (w_hi > T) {
        const double lo = std::max(T, w_lo);
        const double c = f(T);
        out.value += c * mass(lo, w_hi);
        out.derivative += c * (rho_e(t - lo) - rho_e(t - w_hi));
    }
    const double lo = std::max(eps, w_lo), hi = std::min(T, w_hi);
    if (!(hi > lo)) return out;

    if (f.oscillatory()) {
        const double m = f.mean(), A = f.amplitude();
        out.value += m * mass(lo, hi);
        out.derivative += m * (rho_e(t - lo) - rho_e(t - hi));
        if (A == 0.0) return out;
        const auto J = phase_integrals(k, t);
        out.value += A * J[0].imag();
        out.derivative += A * J[1].imag();
        return out;
    }

    const std::array<double, 2> tol = attainable_tolerance(tol_, eps, t);
    const auto r = quad::integrate<2>(
        [&](double u) {
            const double v = f(u);
            return std::array<double, 2>{rho_e(t - u) * v, drho_e(t - u) * v};
        },
        lo, hi, tol);
    if (!r.converged) throw NumericalError("mollify: quadrature did not converge", r.error[0]);
    out.value += r.value[0];
    out.derivative += r.value[1];
    return out;
}

std::array<std::complex<double>, 2> MollifiedCoefficient::phase_integrals(std::size_t k, double t) const
{
    const ScalarFunction& f = field_.entries.at(k);
    if (!f.oscillatory()) throw DomainError("phase_integrals: entry has no phase");
    const double eps = eps_, inv = 1.0 / eps;
    const double lo = std::max(eps, t - eps), hi = std::min(field_.T, t + eps);
    if (!(hi > lo)) return {};
    const double A = std::max(std::abs(f.amplitude()), 1e-300);
    const osc::Phase phase{[&f](double u) { return f.phase(u); }, [&f](double u) { return f.phase_rate(u); }};
    auto tol = attainable_tolerance(tol_, eps, t);
    for (auto& x : tol) x /= A;
    const auto r = osc::integrate<2>(
        [&](double u) {
            const double s = (t - u) * inv;
            return std::array<double, 2>{kernel_.rho(s) * inv, kernel_.drho(s) * inv * inv};
        },
        phase, lo, hi, tol);
    if (!r.converged) throw NumericalError("mollify: oscillatory quadrature did not converge", r.error[0]);
    return r.value;
}

MollifiedCoefficient::Sample MollifiedCoefficient::evaluate(double t, std::span<const double> xi) const
{
    if (field_.n == 1) {
        if (xi.size() != 1 || xi[0] == 0.0) throw DomainError("mollify: xi must be a nonzero scalar");
        return entry(0, t);
    }
    const auto w = symbol_weights(field_, xi);
    Sample s;
    const std::size_t n = field_.n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double weight = (i == j ? 1.0 : 2.0) * w[i * n + j];
            if (weight == 0.0) continue;
            const auto e = entry(i * n + j, t);
            s.value += weight * e.value;
            s.derivative += weight * e.derivative;
        }
    return s;
}

double MollifiedCoefficient::extended(double t, std::span<const double> xi) const
{
    return extend(field_, eps_, t, xi);
}

double mollify_value(const MollifiedCoefficient& mc, double t, std::span<const double> xi)
{
    return mc.evaluate(t, xi).value;
}

double mollify_derivative(const MollifiedCoefficient& mc, double t, std::span<const double> xi)
{
    return mc.evaluate(t, xi).derivative;
}

double mollify_value(const MollifiedCoefficient& mc, double t)
{
    const double xi = 1.0;
    return mollify_value(mc, t, std::span<const double>(&xi, 1));
}

double mollify_derivative(const MollifiedCoefficient& mc, double t)
{
    const double xi = 1.0;
    return mollify_derivative(mc, t, std::span<const double>(&xi, 1));
}

// ---------------------------------------------------------------------------------------------

ApproximationReport verify_approximation(const CoefficientField& field, const MollifierKernel& kernel,
                           std::span<const double> eps_grid, std::span<const double> t_grid,
                           const ApproximationOptions& opt)
{
    if (!field.certificate) throw ValidationError("verify_approximation: field carries no regularity certificate");
    if (eps_grid.empty() || t_grid.empty()) throw DomainError("verify_approximation: empty grid");
    const Certificate& cert = *field.certificate;
    for (double e : eps_grid)
        if (!(e > 0.0) || e > cert.tau0 || e > cert.mu.tau0) throw DomainError("verify_approximation: eps outside ]0, tau0]");
    for (double t : t_grid)
        if (!(t > 0.0) || t > field.T) throw DomainError("verify_approximation: t outside ]0, T]");

    ApproximationReport rep;
    rep.C = cert.C;
    rep.kappa_hat = estimate_doubling(cert.nu, t_grid);
    rep.kappa = std::max({rep.kappa_hat, analytic_kappa(cert.nu), cert.nu.kappa});
    rep.sup_norm = field.sup_norm;
    rep.drho_l1 = kernel.drho_l1();
    const double c_over_k = cert.C / rep.kappa;
    rep.C_prime = std::max({cert.C, c_over_k, 2.0 * field.sup_norm});
    rep.C_double_prime = kernel.drho_l1() * std::max({cert.C, c_over_k, field.sup_norm});

    const std::size_t ne = eps_grid.size(), nt = t_grid.size();
    rep.rows.resize(ne * nt);
    const auto& xis = cert.xi_samples.empty() ? sphere_samples(field.n) : cert.xi_samples;

    parallel_for(ne * nt, opt.workers, [&](std::size_t idx) {
        const double eps = eps_grid[idx / nt], t = t_grid[idx % nt];
        const MollifiedCoefficient mc(field, eps, kernel, opt.tol);
        ApproximationRow row;
        row.eps = eps;
        row.t = t;
        for (const auto& xi : xis) {
            const auto s = mc.evaluate(t, xi);
            row.lhs1 = std::max(row.lhs1, std::abs(s.value - mc.extended(t, xi)));
            row.lhs2 = std::max(row.lhs2, std::abs(s.derivative));
        }
        row.lhs1 *= opt.lhs_scale;
        row.lhs2 *= opt.lhs_scale;
        const double factor = std::min(1.0, eval_modulus(cert.mu, eps) / eval_nu(cert.nu, t));
        row.rhs1 = rep.C_prime * factor;
        row.rhs2 = rep.C_double_prime / eps * factor;
        row.pass1 = row.lhs1 <= row.rhs1;
        row.pass2 = row.lhs2 <= row.rhs2;
        rep.rows[idx] = row;
    });

    rep.worst_margin1 = rep.worst_margin2 = kInf;
    for (const auto& r : rep.rows) {
        rep.worst_margin1 = std::min(rep.worst_margin1, r.rhs1 - r.lhs1);
        rep.worst_margin2 = std::min(rep.worst_margin2, r.rhs2 - r.lhs2);
        if (!r.pass1 || !r.pass2) ++rep.failures;
    }
    rep.all_pass = rep.failures == 0;
    return rep;
}

}  // namespace wellpose
