#include "wellpose/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wellpose/error.hpp"
#include "wellpose/grid.hpp"

namespace wellpose {

namespace {

const double kInvE = std::exp(-1.0);

void require_unit_interval(double v, const char* what)
{
    if (!(v > 0.0 && v <= 1.0)) throw ValidationError(std::string(what) + " must lie in (0, 1]");
}

bool close_enough_above(double lhs, double rhs)
{
    return lhs >= rhs - 1e-12 * std::max(1.0, std::abs(rhs));
}

}  // namespace

PsiSpec PsiSpec::one_minus_exp(double alpha)
{
    require_unit_interval(alpha, "psi.alpha");
    PsiSpec s;
    s.family = Family::OneMinusExp;
    s.alpha = alpha;
    return s;
}

PsiSpec PsiSpec::one_plus_log()
{
    PsiSpec s;
    s.family = Family::OnePlusLog;
    return s;
}

PsiSpec PsiSpec::power_beta(double beta)
{
    require_unit_interval(beta, "psi.beta");
    PsiSpec s;
    s.family = Family::PowerBeta;
    s.beta = beta;
    return s;
}

double PsiSpec::psi(double r) const
{
    switch (family) {
    case Family::Identity: return r;
    case Family::OneMinusExp: return -std::expm1(-alpha * r);
    case Family::OnePlusLog: return 1.0 + std::log(r);
    case Family::PowerBeta: return std::pow(r, beta);
    }
    return r;
}

double PsiSpec::dpsi(double r) const
{
    switch (family) {
    case Family::Identity: return 1.0;
    case Family::OneMinusExp: return alpha * std::exp(-alpha * r);
    case Family::OnePlusLog: return 1.0 / r;
    case Family::PowerBeta: return beta * std::pow(r, beta - 1.0);
    }
    return 1.0;
}

double PsiSpec::log_dpsi(double r) const
{
    switch (family) {
    case Family::Identity: return 0.0;
    case Family::OneMinusExp: return std::log(alpha) - alpha * r;
    case Family::OnePlusLog: return -std::log(r);
    case Family::PowerBeta: return std::log(beta) + (beta - 1.0) * std::log(r);
    }
    return 0.0;
}

double PsiSpec::chi() const
{
    return family == Family::OneMinusExp ? 1.0 : kInf;
}

double PsiSpec::eta() const
{
    switch (family) {
    case Family::Identity: return 1.0;
    case Family::PowerBeta: return beta == 1.0 ? 1.0 : 0.0;
    default: return 0.0;
    }
}

std::string PsiSpec::name() const
{
    std::ostringstream os;
    switch (family) {
    case Family::Identity: os << "identity"; break;
    case Family::OneMinusExp: os << "one_minus_exp(" << alpha << ")"; break;
    case Family::OnePlusLog: os << "one_plus_log"; break;
    case Family::PowerBeta: os << "power_beta(" << beta << ")"; break;
    }
    return os.str();
}

ModulusSpec ModulusSpec::holder(double alpha, double tau0)
{
    require_unit_interval(alpha, "modulus.alpha");
    if (!(tau0 > 0.0)) throw ValidationError("modulus.tau0 must be positive");
    ModulusSpec s;
    s.family = Family::Holder;
    s.alpha = alpha;
    s.tau0 = tau0;
    return s;
}

ModulusSpec ModulusSpec::psi_derived(const PsiSpec& psi, std::size_t grid_points)
{
    ModulusSpec s;
    s.family = Family::PsiDerived;
    s.psi = psi;
    auto passes = [&](double L) {
        s.tau0 = std::exp(-L);
        return validate_modulus(s, default_modulus_grid(s.tau0, grid_points)).pass;
    };
    if (passes(1.0)) {
        s.tau0 = kInvE;
        return s;
    }
    double lo = 1.0, hi = 64.0;  // lo fails, hi must pass
    if (!passes(hi)) throw ValidationError("modulus: no admissible tau0 found for psi " + psi.name());
    for (int i = 0; i < 60 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? hi : lo) = mid;
    }
    s.tau0 = std::exp(-hi);
    return s;
}

ModulusSpec ModulusSpec::custom(std::vector<double> tau, std::vector<double> mu)
{
    if (tau.size() != mu.size() || tau.size() < 2)
        throw ValidationError("modulus: custom samples need matching tau/mu arrays of length >= 2");
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (!std::isfinite(tau[i]) || !std::isfinite(mu[i]) || tau[i] < 0.0)
            throw ValidationError("modulus: custom samples must be finite with tau >= 0");
        if (i > 0 && !(tau[i] > tau[i - 1])) throw ValidationError("modulus: custom tau must be strictly ascending");
    }
    if (tau.front() > 0.0) {
        tau.insert(tau.begin(), 0.0);
        mu.insert(mu.begin(), 0.0);
    }
    mu.front() = 0.0;
    ModulusSpec s;
    s.family = Family::Custom;
    s.tau0 = tau.back();
    s.tau_samples = std::move(tau);
    s.mu_samples = std::move(mu);
    return s;
}

std::string ModulusSpec::name() const
{
    std::ostringstream os;
    switch (family) {
    case Family::Holder: os << "holder(" << alpha << ")"; break;
    case Family::PsiDerived: os << "psi_derived(" << psi.name() << ")"; break;
    case Family::Custom: os << "custom(" << tau_samples.size() << " samples)"; break;
    }
    return os.str();
}

BlowupSpec BlowupSpec::power(double p)
{
    if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("blowup.p must be positive");
    BlowupSpec s;
    s.family = Family::Power;
    s.p = p;
    s.kappa = std::exp2(-p);
    return s;
}

BlowupSpec BlowupSpec::psi_derived(const PsiSpec& psi)
{
    BlowupSpec s;
    s.family = Family::PsiDerived;
    s.psi = psi;
    s.kappa = 0.5;
    return s;
}

BlowupSpec BlowupSpec::constant()
{
    return {};
}

std::string BlowupSpec::name() const
{
    std::ostringstream os;
    switch (family) {
    case Family::Power: os << "power(" << p << ")"; break;
    case Family::PsiDerived: os << "psi_derived(" << psi.name() << ")"; break;
    case Family::Constant: os << "constant"; break;
    }
    return os.str();
}

double eval_modulus(const ModulusSpec& spec, double tau)
{
    if (!(tau >= 0.0) || tau > spec.tau0) {
        std::ostringstream os;
        os << "eval_modulus: tau = " << tau << " outside [0, " << spec.tau0 << "]";
        throw DomainError(os.str());
    }
    if (tau == 0.0) return 0.0;
    switch (spec.family) {
    case ModulusSpec::Family::Holder: return spec.alpha == 1.0 ? tau : std::pow(tau, spec.alpha);
    case ModulusSpec::Family::PsiDerived: {
        const double L = -std::log(tau);
        return tau * L / spec.psi.psi(L);
    }
    case ModulusSpec::Family::Custom: {
        const auto& x = spec.tau_samples;
        const auto& y = spec.mu_samples;
        auto it = std::upper_bound(x.begin(), x.end(), tau);
        if (it == x.end()) return y.back();
        const std::size_t j = static_cast<std::size_t>(it - x.begin());
        const double w = (tau - x[j - 1]) / (x[j] - x[j - 1]);
        return y[j - 1] + w * (y[j] - y[j - 1]);
    }
    }
    return 0.0;
}

double eval_nu(const BlowupSpec& spec, double t)
{
    if (!(t > 0.0)) throw DomainError("eval_nu: t must be positive");
    switch (spec.family) {
    case BlowupSpec::Family::Power: return std::pow(t, spec.p);
    case BlowupSpec::Family::Constant: return 1.0;
    case BlowupSpec::Family::PsiDerived: {
        if (t >= kInvE) return kInvE / spec.psi.dpsi(1.0);
        const double L = -std::log(t);
        const double d = spec.psi.dpsi(L);
        if (d > 1e-300) return t / d;
        return std::exp(std::log(t) - spec.psi.log_dpsi(L));
    }
    }
    return 1.0;
}

double analytic_kappa(const BlowupSpec& spec)
{
    switch (spec.family) {
    case BlowupSpec::Family::Power: return std::exp2(-spec.p);
    case BlowupSpec::Family::PsiDerived: return 0.5;
    case BlowupSpec::Family::Constant: return 1.0;
    }
    return 1.0;
}

double estimate_doubling(const std::function<double(double)>& nu, std::span<const double> t_grid)
{
    if (t_grid.empty()) throw DomainError("estimate_doubling: empty grid");
    double k = kInf;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw DomainError("estimate_doubling: grid points must be positive");
        const double den = nu(t);
        const double ratio = den > 0.0 ? nu(0.5 * t) / den : 0.0;
        k = std::min(k, ratio);
    }
    return k;
}

double estimate_doubling(const BlowupSpec& spec, std::span<const double> t_grid)
{
    return estimate_doubling([&](double t) { return eval_nu(spec, t); }, t_grid);
}

ValidationReport validate_modulus(const ModulusSpec& spec, std::span<const double> grid)
{
    ValidationReport rep;
    if (grid.size() < 3) {
        rep.pass = false;
        rep.message = "grid needs at least 3 points";
        return rep;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0 || grid[i] > spec.tau0 || (i > 0 && !(grid[i] > grid[i - 1]))) {
            rep.pass = false;
            rep.message = "grid must be strictly ascending inside [0, tau0]";
            return rep;
        }
    }
    std::vector<double> mu(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) mu[i] = eval_modulus(spec, grid[i]);

    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(mu[i] > mu[i - 1])) {
            rep.pass = false;
            rep.violation = std::make_pair(grid[i - 1], grid[i]);
            rep.message = "not strictly increasing";
            return rep;
        }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            const double m = eval_modulus(spec, 0.5 * (grid[i] + grid[j]));
            const double chord = 0.5 * (mu[i] + mu[j]);
            if (m < chord - 1e-12 * std::max(1.0, std::abs(m))) {
                rep.pass = false;
                rep.violation = std::make_pair(grid[i], grid[j]);
                rep.message = "midpoint concavity violated";
                return rep;
            }
        }
    }
    rep.message = "ok";
    return rep;
}

PsiReport validate_psi(const PsiSpec& spec, std::span<const double> r_grid)
{
    PsiReport rep;
    auto fail = [&](double r, const char* msg) {
        if (rep.pass) {
            rep.pass = false;
            rep.violation = r;
            rep.message = msg;
        }
    };
    if (r_grid.size() < 2) {
        rep.pass = false;
        rep.message = "grid needs at least 2 points";
        return rep;
    }
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        const double r = r_grid[i];
        if (!(r >= 1.0) || (i > 0 && !(r > r_grid[i - 1]))) {
            fail(r, "grid must be strictly ascending inside [1, inf)");
            return rep;
        }
        if (!std::isfinite(spec.log_dpsi(r))) fail(r, "psi' vanishes");
        if (i == 0) continue;
        const double q = r_grid[i - 1];
        if (!close_enough_above(spec.psi(r), spec.psi(q))) fail(r, "psi not increasing");
        if (!close_enough_above(spec.log_dpsi(q), spec.log_dpsi(r))) fail(r, "psi' not non-increasing");
        if (!close_enough_above(r + spec.log_dpsi(r), q + spec.log_dpsi(q))) fail(r, "e^r psi' not non-decreasing");
    }
    const double R = r_grid.back();
    rep.chi_estimate = spec.psi(R);
    rep.chi_unbounded = spec.psi(R) - spec.psi(R / 10.0) > 1e-9 * std::max(1.0, std::abs(rep.chi_estimate));
    rep.eta_estimate = spec.dpsi(R);
    if (rep.pass) rep.message = "ok";
    return rep;
}

std::vector<double> default_modulus_grid(double tau0, std::size_t n)
{
    if (n < 3) throw DomainError("default_modulus_grid: need at least 3 points");
    std::vector<double> g{0.0};
    const auto tail = log_space(tau0 * 1e-12, tau0, n - 1);
    g.insert(g.end(), tail.begin(), tail.end());
    g.back() = tau0;
    return g;
}

std::vector<double> default_psi_grid(std::size_t n, double r_max)
{
    return log_space(1.0, r_max, n);
}

}  // namespace wellpose
