#include "wellpose/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wellpose/error.hpp"

namespace wellpose {

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y)
{
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("regression: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        ss_res += r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
    return f;
}

}  // namespace

GrowthFit fit_growth(std::span<const GrowthSample> samples, const ExponentModel& model, const GrowthFitOptions& o)
{
    if (!(o.slack >= 0.0) || !(o.floor >= 0.0) || !(o.min_decades > 0.0))
        throw ValidationError("fit_growth: slack, floor and min_decades must be non-negative");
    if (samples.size() < std::max<std::size_t>(o.min_points, 2))
        throw DomainError("fit_growth: need at least " + std::to_string(o.min_points) + " grid points");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].xi) || !std::isfinite(samples[i].log_ratio))
            throw DomainError("fit_growth: non-finite sample");
        if (i > 0 && !(samples[i].xi > samples[i - 1].xi)) throw DomainError("fit_growth: xi grid must be increasing");
    }
    const double xi_min = samples.front().xi, xi_max = samples.back().xi;
    if (xi_min < model.xi_threshold() * (1.0 - 1e-12))
        throw DomainError("fit_growth: grid starts below the model threshold");
    if (std::log10(xi_max / xi_min) < o.min_decades * (1.0 - 1e-12))
        throw DomainError("fit_growth: grid spans fewer than " + std::to_string(o.min_decades) + " decades");

    GrowthFit fit;
    fit.kind = model.kind;
    fit.slack = o.slack;
    std::vector<double> y;
    for (const auto& s : samples) {
        fit.xi.push_back(s.xi);
        fit.shape.push_back(model.shape(s.xi));
        y.push_back(s.log_ratio);
    }
    const auto line = least_squares(fit.shape, y);
    fit.slope = line.slope;
    fit.intercept = line.intercept;
    fit.r_squared = line.r_squared;

    fit.sup_ratio = -std::numeric_limits<double>::infinity();
    fit.head_sup_ratio = -std::numeric_limits<double>::infinity();
    const double head_end = xi_max / 10.0 * (1.0 + 1e-12);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] / fit.shape[i];
        fit.ratios.push_back(r);
        fit.residuals.push_back(y[i] - line.intercept - line.slope * fit.shape[i]);
        fit.sup_ratio = std::max(fit.sup_ratio, r);
        if (fit.xi[i] <= head_end) fit.head_sup_ratio = std::max(fit.head_sup_ratio, r);
    }
    const double head = fit.head_sup_ratio;
    fit.threshold = (head >= 0.0 ? (1.0 + o.slack) * head : head / (1.0 + o.slack)) + o.floor;
    fit.consistent = fit.sup_ratio <= fit.threshold;
    return fit;
}

DecaySample decay_sample(double xi, std::complex<double> u, std::complex<double> ut)
{
    if (!(xi > 0.0)) throw DomainError("decay_sample: |xi| must be positive");
    const double m = std::max(std::abs(u), std::abs(ut) / xi);
    return {xi, m > 0.0 ? std::log(m) : -std::numeric_limits<double>::infinity()};
}

DecayProfile check_decay(std::span<const DecaySample> samples, const DecayOptions& o)
{
    if (o.kind == DecayOptions::Kind::Gevrey && !(o.sigma >= 1.0))
        throw ValidationError("check_decay: Gevrey index must be >= 1");
    if (o.kind == DecayOptions::Kind::Polynomial) {
        if (o.zetas.empty()) throw ValidationError("check_decay: no zeta requested");
        for (double z : o.zetas)
            if (!(z > 0.0)) throw ValidationError("check_decay: zeta must be positive");
    }
    DecayProfile out;
    out.kind = o.kind;
    out.sigma = o.sigma;
    bool any_nonzero = false;
    for (const auto& s : samples) {
        if (!(s.xi >= o.xi_threshold * (1.0 - 1e-12))) throw DomainError("check_decay: sample below the |xi| threshold");
        if (std::isnan(s.log_magnitude) || s.log_magnitude == std::numeric_limits<double>::infinity())
            throw DomainError("check_decay: non-finite magnitude");
        if (std::isinf(s.log_magnitude)) continue;
        any_nonzero = true;
        if (s.xi >= o.min_xi * (1.0 - 1e-12)) out.samples.push_back(s);
    }
    if (!any_nonzero) throw DomainError("check_decay: all samples are zero");
    std::sort(out.samples.begin(), out.samples.end(),
              [](const DecaySample& a, const DecaySample& b) { return a.xi < b.xi; });
    if (out.samples.size() < 2) throw DomainError("check_decay: fewer than 2 usable samples");

    if (o.kind == DecayOptions::Kind::Gevrey) {
        std::vector<double> x, y;
        for (const auto& s : out.samples) {
            x.push_back(std::pow(s.xi, 1.0 / o.sigma));
            y.push_back(s.log_magnitude);
        }
        const auto line = least_squares(x, y);
        out.delta = -line.slope;
        out.log_K = line.intercept;
        out.K = std::exp(line.intercept);
        out.r_squared = line.r_squared;
        out.pass = out.delta > 0.0 && out.K > 0.0;
        return out;
    }

    out.zetas = o.zetas;
    out.pass = true;
    const auto& last = out.samples.back();
    const auto& prev = out.samples[out.samples.size() - 2];
    for (double z : o.zetas) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& s : out.samples) best = std::max(best, s.log_magnitude + z * std::log(s.xi));
        out.log_K_zeta.push_back(best);
        out.K_zeta.push_back(std::exp(best));
        const bool ok = last.log_magnitude + z * std::log(last.xi) <= prev.log_magnitude + z * std::log(prev.xi);
        out.zeta_pass.push_back(ok);
        out.pass = out.pass && ok;
    }
    return out;
}

std::string small_fraction(double x)
{
    if (!std::isfinite(x)) return "";
    for (long d = 1; d <= 1000; ++d) {
        const double n = std::round(x * static_cast<double>(d));
        if (std::abs(n / static_cast<double>(d) - x) <= 1e-12 * std::max(1.0, std::abs(x))) {
            std::ostringstream os;
            os << static_cast<long>(n);
            if (d != 1) os << '/' << d;
            return os.str();
        }
    }
    return "";
}

std::string modulus_formula(const PsiSpec& psi)
{
    std::ostringstream os;
    os.precision(17);
    switch (psi.family) {
    case PsiSpec::Family::Identity: return "τ";
    case PsiSpec::Family::OneMinusExp: os << "τ|log τ|/(1-τ^" << psi.alpha << ")"; return os.str();
    case PsiSpec::Family::OnePlusLog: return "τ|log τ|/(1+log|log τ|)";
    case PsiSpec::Family::PowerBeta: os << "τ|log τ|^" << 1.0 - psi.beta; return os.str();
    }
    return "";
}

Classification classify(const GrowthFit& fit, const ExponentModel& model, const DecayProfile& decay)
{
    if (fit.kind != model.kind) throw ValidationError("classify: fit and model kinds differ");
    if (!fit.consistent) throw DomainError("classify: growth fit is inconsistent with the model");
    Classification c;
    c.kind = model.kind;
    c.M_slope = fit.slope;
    c.M_sup = fit.sup_ratio;

    if (model.kind == ExponentModel::Kind::Gevrey) {
        c.p = model.p;
        c.alpha = model.alpha;
        c.sigma_star = model.sigma_star();
        c.sigma_star_fraction = small_fraction(c.sigma_star);
        const std::string bound = c.sigma_star_fraction.empty() ? std::to_string(c.sigma_star) : c.sigma_star_fraction;
        c.verdict = "γ^(σ) well-posed for 1 ≤ σ < " + bound;
        c.limit_note = "p = α = 1: σ* unbounded, C∞ regime";
        if (decay.kind == DecayOptions::Kind::Gevrey) {
            c.data_sigma = decay.sigma;
            c.decay_preserved = decay.pass && decay.sigma >= 1.0 && decay.sigma < c.sigma_star;
            if (decay.sigma >= c.sigma_star) c.notes.push_back("data index at or above σ*: no preservation predicted");
            else if (!decay.pass) c.notes.push_back("data decay fit failed");
            else c.notes.push_back("data decay class γ^(" + small_fraction(decay.sigma) + ") predicted to persist");
        } else {
            c.notes.push_back("no Gevrey data profile supplied");
        }
        return c;
    }

    c.verdict = "C∞ well-posed";
    c.psi = model.psi.name();
    c.modulus_note = modulus_formula(model.psi);
    if (decay.kind == DecayOptions::Kind::Polynomial) {
        const double M = std::max(c.M_sup, 0.0);
        for (std::size_t i = 0; i < decay.zetas.size(); ++i) {
            c.zetas.push_back(decay.zetas[i]);
            c.thetas.push_back(decay.zetas[i] - M);
        }
        if (!decay.pass) c.notes.push_back("data decay check failed for some ζ");
    } else {
        c.notes.push_back("no polynomial data profile supplied");
    }
    return c;
}

}  // namespace wellpose
