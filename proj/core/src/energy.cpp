#include "wellpose/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wellpose/error.hpp"
#include "wellpose/grid.hpp"
#include "wellpose/ode.hpp"
#include "wellpose/quadrature.hpp"

namespace wellpose {

namespace {

const double kInvE = std::exp(-1.0);

void check_xi(std::span<const double> xi, std::size_t n)
{
    if (xi.size() != n) throw DomainError("xi has the wrong dimension");
    if (!(xi_norm(xi) >= 1.0)) throw DomainError("mode analysis requires |xi| >= 1");
}

// Illinois variant of regula falsi on a bracketing interval.
template <class F>
double illinois(F&& f, double a, double b, double fa, double fb)
{
    int side = 0;
    for (int it = 0; it < 100; ++it) {
        if (std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) break;
        const double c = (a * fb - b * fa) / (fb - fa);
        if (!(c > std::min(a, b) && c < std::max(a, b))) return 0.5 * (a + b);
        const double fc = f(c);
        if (fc == 0.0) return c;
        if ((fc > 0.0) == (fb > 0.0)) {
            b = c;
            fb = fc;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == 1) fb *= 0.5;
            side = 1;
        }
    }
    return 0.5 * (a + b);
}

// Mean over theta of |c - A sin theta|, A > 0.
double abs_sine_mean(double c, double A)
{
    if (std::abs(c) >= A) return std::abs(c);
    return 2.0 / std::numbers::pi * (c * std::asin(c / A) + std::sqrt(A * A - c * c));
}

// Zero-mean antiderivative in theta of |c - A sin theta| - abs_sine_mean(c, A), evaluated at theta.
double abs_sine_antiderivative(double c, double A, double theta)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    theta -= two_pi * std::floor(theta / two_pi);
    std::vector<double> br{0.0, two_pi};
    if (std::abs(c) < A) {
        const double r = std::asin(c / A);
        for (double b : {r, std::numbers::pi - r}) br.push_back(b < 0.0 ? b + two_pi : b);
    }
    std::sort(br.begin(), br.end());
    // on each piece the sign of c - A sin is fixed: F = c s + A cos s, G = c s^2/2 - A (sin s - s cos s)
    auto F = [&](double x) { return c * x + A * std::cos(x); };
    auto G = [&](double x) { return 0.5 * c * x * x - A * (std::sin(x) - x * std::cos(x)); };
    double up_to = 0.0, moment = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const double a = br[i], b = br[i + 1];
        if (b <= a) continue;
        const double sg = c - A * std::sin(0.5 * (a + b)) >= 0.0 ? 1.0 : -1.0;
        moment += sg * (G(b) - G(a));
        if (theta > a) up_to += sg * (F(std::min(theta, b)) - F(a));
    }
    const double m = abs_sine_mean(c, A);
    return up_to - m * theta + (moment - m * two_pi * two_pi / 2.0) / two_pi;
}

}  // namespace

double xi_norm(std::span<const double> xi)
{
    double s = 0.0;
    for (double v : xi) s += v * v;
    return std::sqrt(s);
}

EnergyTrace integrate_mode(const CoefficientField& field, std::span<const double> xi, std::complex<double> u0,
                           std::complex<double> u1, double T, const ModeOptions& opt)
{
    check_xi(xi, field.n);
    if (!(T > opt.t_start) || T > field.T || opt.t_start < 0.0) throw DomainError("integrate_mode: need 0 <= t_start < T <= field.T");
    if (opt.t_start == 0.0 && !field.has_limit_at_zero())
        throw DomainError("integrate_mode: coefficient has no limit at t = 0; set a positive t_start");
    if (!std::isfinite(u0.real()) || !std::isfinite(u0.imag()) || !std::isfinite(u1.real()) || !std::isfinite(u1.imag()))
        throw DomainError("integrate_mode: initial data must be finite");
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw DomainError("integrate_mode: tolerances must be positive");

    EnergyTrace tr;
    tr.xi.assign(xi.begin(), xi.end());
    std::vector<double> times = opt.times.empty() ? lin_space(opt.t_start, T, std::max<std::size_t>(opt.samples, 2)) : opt.times;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] < opt.t_start || times[i] > T || (i > 0 && times[i] < times[i - 1]))
            throw DomainError("integrate_mode: output times must be ascending inside [t_start, T]");

    const double k2 = xi_norm(xi) * xi_norm(xi);
    const auto w = symbol_weights(field, xi);
    auto a = [&](double t) {
        if (field.n == 1) return field.entries[0](t);
        double s = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[k] != 0.0) s += w[k] * field.entries[k](t);
        return s;
    };
    auto rhs = [&](double t, const ode::State<4>& y) {
        const double c = -a(t) * k2;
        return ode::State<4>{y[2], y[3], c * y[0], c * y[1]};
    };

    ode::Options o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    o.max_step = opt.step_factor / (std::sqrt(k2) * std::sqrt(field.Lambda0));
    tr.t.reserve(times.size());
    const auto stats = ode::integrate<4>(
        rhs, opt.t_start, ode::State<4>{u0.real(), u0.imag(), u1.real(), u1.imag()}, times,
        [&](std::size_t i, const ode::State<4>& y) {
            tr.t.push_back(times[i]);
            tr.u.emplace_back(y[0], y[1]);
            tr.ut.emplace_back(y[2], y[3]);
        },
        o);
    tr.stats = {stats.steps, stats.rejected, stats.evaluations, stats.max_error};
    return tr;
}

double approximate_energy(const ModeState& state, const MollifiedCoefficient& mc)
{
    const double k = xi_norm(state.xi);
    const double ae = mc.evaluate(state.t, state.xi).value;
    return ae * k * k * std::norm(state.u) + std::norm(state.ut);
}

double flat_energy(const ModeState& state)
{
    const double k = xi_norm(state.xi);
    return k * k * std::norm(state.u) + std::norm(state.ut);
}

void attach_energy(EnergyTrace& trace, const MollifiedCoefficient& mc)
{
    trace.eps = mc.eps();
    trace.energy.resize(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) trace.energy[i] = approximate_energy(trace.state(i), mc);
}

double gronwall_integrand(double t, std::span<const double> xi, const CoefficientField& field,
                          const MollifiedCoefficient& mc)
{
    if (!(t > 0.0) || t > field.T) throw DomainError("gronwall_integrand: t outside ]0, T]");
    const auto s = mc.evaluate(t, xi);
    const double a = symbol(field, t, xi);
    if (!(s.value > 0.0)) throw NumericalError("gronwall_integrand: mollified coefficient not positive", s.value);
    return std::abs(s.derivative) / s.value + xi_norm(xi) * std::abs(s.value - a) / std::sqrt(s.value);
}

GronwallResult gronwall_cumulative(const MollifiedCoefficient& mc, std::span<const double> xi,
                                   std::span<const double> times, const GronwallOptions& opt)
{
    const CoefficientField& field = mc.field();
    if (xi.size() != field.n || xi_norm(xi) == 0.0) throw DomainError("gronwall: xi must be nonzero");
    if (times.empty()) throw DomainError("gronwall: no output times");
    const double t_lo = opt.t_start, t_hi = times.back();
    if (t_lo < 0.0 || t_hi > field.T) throw DomainError("gronwall: interval outside [0, T]");
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] < t_lo || (i > 0 && times[i] < times[i - 1])) throw DomainError("gronwall: times must be ascending and >= t_start");

    GronwallResult res;
    res.cumulative.assign(times.size(), 0.0);
    if (!(t_hi > t_lo)) return res;

    const CoefficientSurrogate sur(mc, t_lo, t_hi, opt.surrogate);
    res.surrogate_panels = sur.panels();
    res.converged = sur.converged();
    const auto w = symbol_weights(field, xi);
    const double kx = xi_norm(xi);
    const double eps = mc.eps(), T = field.T;

    std::vector<std::size_t> osc;
    for (std::size_t k = 0; k < w.size(); ++k)
        if (w[k] != 0.0 && field.entries[k].oscillatory() && field.entries[k].amplitude() != 0.0) osc.push_back(k);

    auto a_true = [&](double t) {
        if (field.n == 1) return field.entries[0](t);
        double s = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[k] != 0.0) s += w[k] * field.entries[k](t);
        return s;
    };
    // (a_eps, a_eps', a_eps - a)
    auto probe = [&](double t) {
        const auto s = sur.evaluate(t, w);
        ++res.evaluations;
        return std::array<double, 3>{s.value, s.derivative, s.value - a_true(t)};
    };
    auto g = [&](double t) {
        const auto p = probe(t);
        if (!(p[0] > 0.0)) throw NumericalError("gronwall: mollified coefficient not positive", p[0]);
        return std::array<double, 1>{std::abs(p[1]) / p[0] + kx * std::abs(p[2]) / std::sqrt(p[0])};
    };
    auto rate = [&](double t) {
        double r = 0.0;
        for (std::size_t k : osc) r = std::max(r, std::abs(field.entries[k].phase_rate(t)));
        return r;
    };

    double acc = 0.0;
    double t_direct = t_lo;
    bool layer = false;
    std::vector<std::size_t> wild;  // weighted entries without a limit at 0
    for (std::size_t k : osc)
        if (!field.entries[k].has_limit_at_zero()) wild.push_back(k);
    if (t_lo == 0.0 && !wild.empty()) {
        const ScalarFunction& f0 = field.entries[wild.front()];
        for (std::size_t k : wild) {
            const ScalarFunction& f = field.entries[k];
            if (f.kind() != f0.kind() || f.q() != f0.q() || f.k() != f0.k() || f.horizon() != f0.horizon() ||
                f.psi().family != f0.psi().family || f.psi().alpha != f0.psi().alpha || f.psi().beta != f0.psi().beta)
                throw DomainError("gronwall: entries oscillate with different phases near 0; set a positive t_start");
        }
        // a = base(t) + A sin(Phi(t)) with one shared phase
        double A = 0.0;
        for (std::size_t k : wild) A += w[k] * field.entries[k].amplitude();
        A = std::abs(A);
        auto base = [&](double t) {
            double s = 0.0;
            for (std::size_t k = 0; k < w.size(); ++k) {
                if (w[k] == 0.0) continue;
                const bool is_wild = std::find(wild.begin(), wild.end(), k) != wild.end();
                s += w[k] * (is_wild ? field.entries[k].mean() : field.entries[k](t));
            }
            return s;
        };
        if (f0.kind() == ScalarFunction::Kind::HolderSingular) {
            // 1/(t |Phi'|) = t^q / q
            t_direct = std::min(t_hi, std::pow(f0.q() * opt.average_rtol, 1.0 / f0.q()));
            // the average also needs a_eps free of the oscillation: eps |Phi'| beyond the kernel's damping frequency
            const double w_damp = mc.kernel().damping_frequency();
            if (!std::isfinite(w_damp))
                throw NumericalError("gronwall: kernel does not damp the oscillation near t = 0; set a positive t_start", 0.0);
            t_direct = std::min(t_direct, std::pow(f0.q() * eps / w_damp, 1.0 / (f0.q() + 1.0)));
            auto gbar = [&](double t) {
                const auto s = sur.evaluate(t, w);
                ++res.evaluations;
                if (!(s.value > 0.0)) throw NumericalError("gronwall: mollified coefficient not positive", s.value);
                const double m = abs_sine_mean(s.value - base(t), A);
                return std::array<double, 1>{std::abs(s.derivative) / s.value + kx * m / std::sqrt(s.value)};
            };
            std::vector<double> lc{0.0, t_direct};
            for (double b : {eps, 2.0 * eps})
                if (b < t_direct) lc.push_back(b);
            std::sort(lc.begin(), lc.end());
            for (std::size_t i = 0; i + 1 < lc.size(); ++i) {
                const auto q = quad::integrate<1>(gbar, lc[i], lc[i + 1],
                                                  std::array<double, 1>{opt.tol * (lc[i + 1] - lc[i]) / (t_hi - t_lo)});
                acc += q.value[0];
                res.error += q.error[0];
                res.converged = res.converged && q.converged;
            }
            // leading boundary term of the averaging expansion; the remainder is second order in 1/(t Phi')
            const auto s = sur.evaluate(t_direct, w);
            acc += kx / std::sqrt(s.value) * abs_sine_antiderivative(s.value - base(t_direct), A, f0.phase(t_direct)) /
                   f0.phase_rate(t_direct);
            res.error += kx * A * 2.0 * std::numbers::pi * opt.average_rtol * opt.average_rtol * t_direct / std::sqrt(field.lambda0);
        } else {
            // integrand bounded: drop [0, t_f] and account for it in the error
            const double bound = kx * 2.0 * A / std::sqrt(field.lambda0) +
                                 mc.kernel().drho_l1() * 2.0 * field.sup_norm / (eps * field.lambda0);
            t_direct = std::min(t_hi, 0.5 * opt.tol / bound);
            acc += 0.5 * t_direct * bound;
            res.error += 0.5 * t_direct * bound;
        }
        layer = true;
        for (double t : times)
            if (t > 0.0 && t < t_direct) throw DomainError("gronwall: output time inside the layer near t = 0");
    }

    std::vector<double> cuts(times.begin(), times.end());
    std::erase_if(cuts, [&](double c) { return c < t_direct; });
    cuts.push_back(t_direct);
    // geometric refinement from a tiny start toward the eps scale
    if (t_direct > 0.0)
        for (double b = 4.0 * t_direct; b < std::min(eps, t_hi); b *= 4.0) cuts.push_back(b);
    else if (t_direct == 0.0 && !layer)
        for (double b = std::min(eps, t_hi) / 4.0; b > 1e-3 * std::min(eps, t_hi); b /= 4.0) cuts.push_back(b);
    for (double b : {eps, 2.0 * eps, T - eps, kInvE}) cuts.push_back(b);
    if (field.certificate && field.certificate->mu.family == ModulusSpec::Family::Holder &&
        field.certificate->nu.family == BlowupSpec::Family::Power)
        cuts.push_back(std::pow(eps, field.certificate->mu.alpha / field.certificate->nu.p));
    cuts.insert(cuts.end(), opt.breakpoints.begin(), opt.breakpoints.end());
    std::erase_if(cuts, [&](double c) { return !(c >= t_direct && c <= t_hi); });
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double width = t_hi - t_lo;
    const double max_chunk = width / 64.0;
    const int S = std::max(2, opt.root_samples);
    // accuracy floor per unit length: rounding of a and of large phases Phi
    const double scale = 1.0 + kx * field.Lambda0 / std::sqrt(field.lambda0);
    auto floor_rate = [&](double t) {
        double ph = 0.0;
        for (std::size_t k : osc) ph = std::max(ph, std::abs(field.entries[k].phase(t)));
        return 64.0 * std::numeric_limits<double>::epsilon() * scale * (1.0 + ph);
    };
    std::size_t next = 0;
    while (next < times.size() && times[next] <= t_direct) {
        res.cumulative[next] = times[next] == 0.0 ? 0.0 : acc;
        ++next;
    }

    std::vector<double> pts(static_cast<std::size_t>(S) + 1);
    std::vector<std::array<double, 3>> vals(pts.size());
    std::vector<double> roots;

    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double s0 = cuts[s], s1 = cuts[s + 1];
        double pos = s0;
        while (pos < s1) {
            double h = std::min(max_chunk, s1 - pos);
            if (!osc.empty()) {
                double r = rate(pos);
                if (r > 0.0) h = std::min(h, 0.5 * std::numbers::pi / r);
                r = std::max(r, rate(std::min(pos + h, s1)));
                if (r > 0.0) h = std::min(h, 0.5 * std::numbers::pi / r);
            }
            double end = pos + h;
            if (end > s1 || s1 - end < 1e-3 * h) end = s1;

            for (int j = 0; j <= S; ++j) {
                pts[j] = j == S ? end : pos + (end - pos) * j / S;
                vals[j] = probe(pts[j]);
            }
            roots.clear();
            for (int j = 0; j < S; ++j)
                for (int c = 1; c <= 2; ++c) {
                    const double fa = vals[j][c], fb = vals[j + 1][c];
                    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
                        roots.push_back(illinois([&](double t) { return probe(t)[c]; }, pts[j], pts[j + 1], fa, fb));
                }
            std::sort(roots.begin(), roots.end());
            double left = pos;
            roots.push_back(end);
            for (double r : roots) {
                if (r > left) {
                    const auto q = quad::integrate<1>(g, left, r, std::array<double, 1>{std::max(opt.tol * (r - left) / width, floor_rate(left) * (r - left))});
                    acc += q.value[0];
                    res.error += q.error[0];
                    res.converged = res.converged && q.converged;
                }
                left = std::max(left, r);
            }
            pos = end;
        }
        while (next < times.size() && times[next] <= s1) res.cumulative[next++] = acc;
    }
    while (next < times.size()) res.cumulative[next++] = acc;
    res.total = acc;
    return res;
}

GronwallResult gronwall_bound(const CoefficientField& field, std::span<const double> xi, double eps,
                              const GronwallOptions& opt, const MollifierKernel& kernel)
{
    const MollifiedCoefficient mc(field, eps, kernel);
    const double T = field.T;
    return gronwall_cumulative(mc, xi, std::span<const double>(&T, 1), opt);
}

void attach_gronwall(EnergyTrace& trace, const MollifiedCoefficient& mc, const GronwallOptions& opt)
{
    if (trace.t.empty()) return;
    GronwallOptions o = opt;
    o.t_start = trace.t.front();
    trace.gronwall = gronwall_cumulative(mc, trace.xi, trace.t, o).cumulative;
}

// ---------------------------------------------------------------------------------------------

ExponentModel ExponentModel::gevrey(double p, double alpha, double M)
{
    if (!(alpha > 0.0) || !(p > alpha)) throw ValidationError("Gevrey model needs p > alpha > 0");
    if (!(M >= 0.0)) throw ValidationError("exponent model needs M >= 0");
    ExponentModel m;
    m.kind = Kind::Gevrey;
    m.p = p;
    m.alpha = alpha;
    m.M = M;
    return m;
}

ExponentModel ExponentModel::log_psi(const PsiSpec& psi, double M, double tau1)
{
    if (!(M >= 0.0)) throw ValidationError("exponent model needs M >= 0");
    if (!(tau1 > 0.0 && tau1 <= kInvE * (1.0 + 1e-15))) throw ValidationError("log-psi model needs 0 < tau1 <= e^-1");
    ExponentModel m;
    m.kind = Kind::LogPsi;
    m.psi = psi;
    m.M = M;
    m.tau1 = tau1;
    return m;
}

double ExponentModel::sigma_star() const
{
    return kind == Kind::Gevrey ? p / (p - alpha) : kInf;
}

double ExponentModel::gevrey_exponent() const
{
    return (p - alpha) / p;
}

double ExponentModel::xi_threshold() const
{
    return kind == Kind::Gevrey ? 1.0 : 1.0 / tau1;
}

double ExponentModel::shape(double xi) const
{
    if (xi < xi_threshold() * (1.0 - 1e-12)) throw DomainError("exponent model used below its |xi| threshold");
    return kind == Kind::Gevrey ? 1.0 + 4.0 * std::pow(xi, gevrey_exponent()) : 1.0 + std::log(xi);
}

double theoretical_exponent(const ExponentModel& model, double xi)
{
    return model.M * model.shape(xi);
}

RatioBound energy_ratio_bound(const ExponentModel& model, double lambda0, double Lambda0, double xi)
{
    if (!(lambda0 > 0.0) || !(Lambda0 >= lambda0)) throw DomainError("energy_ratio_bound: need 0 < lambda0 <= Lambda0");
    model.shape(xi);  // threshold check
    RatioBound r;
    r.log_value = model.M + std::log(Lambda0 / lambda0);
    if (model.kind == ExponentModel::Kind::Gevrey)
        r.log_value += 4.0 * model.M * std::pow(xi, model.gevrey_exponent());
    else
        r.log_value += model.M * std::log(xi);
    r.value = std::exp(r.log_value);
    return r;
}

double tau_one(const CoefficientField& field)
{
    const double tau0 = field.certificate ? std::min(field.certificate->tau0, field.certificate->mu.tau0) : field.T;
    return std::min({tau0, field.T, kInvE});
}

ExponentModel analytic_model(const CoefficientField& field, ExponentModel::Kind kind, const MollifierKernel& kernel)
{
    if (!field.certificate) throw ValidationError("analytic_model: field carries no certificate");
    const Certificate& c = *field.certificate;
    const double kappa = std::max(c.nu.kappa, analytic_kappa(c.nu));
    const double Cp = std::max({c.C, c.C / kappa, 2.0 * field.sup_norm});
    const double Cpp = kernel.drho_l1() * std::max({c.C, c.C / kappa, field.sup_norm});
    const double l0 = field.lambda0, L0 = field.Lambda0;

    if (kind == ExponentModel::Kind::Gevrey) {
        if (c.mu.family != ModulusSpec::Family::Holder || c.nu.family != BlowupSpec::Family::Power)
            throw ValidationError("analytic Gevrey model needs a Holder modulus and a power blow-up rate");
        const double p = c.nu.p, alpha = c.mu.alpha;
        if (!(p > 1.0)) throw ValidationError("analytic Gevrey model needs p > 1");
        const double f = std::max(1.0, 1.0 / (p - 1.0));
        const double M = std::max({2.0 * L0 / std::sqrt(l0), Cpp / l0 * f, Cp / std::sqrt(l0) * f});
        return ExponentModel::gevrey(p, alpha, M);
    }
    if (c.mu.family != ModulusSpec::Family::PsiDerived || c.nu.family != BlowupSpec::Family::PsiDerived)
        throw ValidationError("analytic log-psi model needs psi-derived modulus and blow-up rate");
    const PsiSpec& psi = c.nu.psi;
    const double tau1 = tau_one(field);
    const double F = std::numbers::e * psi.dpsi(1.0) * std::max(0.0, field.T - kInvE) / psi.psi(-std::log(tau1));
    ExponentModel m = ExponentModel::log_psi(psi, 0.0, tau1);
    m.M_double_prime = Cpp / l0 * (1.0 + F);
    m.M_prime = 2.0 * L0 / std::sqrt(l0) + Cp / std::sqrt(l0) * (1.0 + F);
    m.M = m.M_prime + m.M_double_prime;
    return m;
}

}  // namespace wellpose
