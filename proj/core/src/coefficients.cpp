#include "wellpose/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wellpose/error.hpp"
#include "wellpose/grid.hpp"

namespace wellpose {

namespace {

const double kInvE = std::exp(-1.0);

}  // namespace

// ---------------------------------------------------------------------------------------------
// Pchip

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y))
{
    const std::size_t n = x_.size();
    if (n != y_.size() || n < 2) throw ValidationError("table: need matching columns with at least 2 rows");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) throw ValidationError("table: non-finite entry");
        if (i > 0 && !(x_[i] > x_[i - 1])) throw ValidationError("table: t column must be strictly ascending");
    }
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = delta[0];
        return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (delta[k - 1] * delta[k] <= 0.0) continue;
        const double w1 = 2.0 * h[k] + h[k - 1], w2 = h[k] + 2.0 * h[k - 1];
        d_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
    // one-sided three-point end slopes, limited to preserve shape
    auto edge = [](double h0, double h1, double m0, double m1) {
        double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if (d * m0 <= 0.0) d = 0.0;
        else if (m0 * m1 <= 0.0 && std::abs(d) > 3.0 * std::abs(m0)) d = 3.0 * m0;
        return d;
    };
    d_[0] = edge(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double Pchip::operator()(double t) const
{
    if (t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    const std::size_t j = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
    const double h = x_[j + 1] - x_[j];
    const double s = (t - x_[j]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y_[j] + (s3 - 2 * s2 + s) * h * d_[j] + (-2 * s3 + 3 * s2) * y_[j + 1] +
           (s3 - s2) * h * d_[j + 1];
}

// ---------------------------------------------------------------------------------------------
// ScalarFunction

ScalarFunction ScalarFunction::constant(double c)
{
    if (!std::isfinite(c)) throw ValidationError("constant coefficient must be finite");
    ScalarFunction f;
    f.kind_ = Kind::Constant;
    f.c0_ = c;
    return f;
}

ScalarFunction ScalarFunction::linear(double c0, double c1)
{
    if (!std::isfinite(c0) || !std::isfinite(c1)) throw ValidationError("linear coefficient must be finite");
    ScalarFunction f;
    f.kind_ = Kind::Linear;
    f.c0_ = c0;
    f.c1_ = c1;
    return f;
}

ScalarFunction ScalarFunction::holder_singular(double mean, double amp, double q)
{
    if (!(q > 0.0) || !std::isfinite(q)) throw ValidationError("holder_singular: q must be positive");
    ScalarFunction f;
    f.kind_ = Kind::HolderSingular;
    f.c0_ = mean;
    f.amp_ = amp;
    f.q_ = q;
    return f;
}

ScalarFunction ScalarFunction::psi_singular(double mean, double amp, double k, const PsiSpec& psi, double T)
{
    if (!(k > 0.0) || !std::isfinite(k)) throw ValidationError("psi_singular: k must be positive");
    if (!(T > 0.0)) throw ValidationError("psi_singular: T must be positive");
    ScalarFunction f;
    f.kind_ = Kind::PsiSingular;
    f.c0_ = mean;
    f.amp_ = amp;
    f.k_ = k;
    f.psi_ = psi;
    f.T_ = T;
    // phase(t) = -k psi(|log t|) + phi_splice_ on ]0, min(T, e^-1)], chosen so that phase(T) = 0
    if (T >= kInvE)
        f.phi_splice_ = k * psi.psi(1.0) - k * std::numbers::e * psi.dpsi(1.0) * (T - kInvE);
    else
        f.phi_splice_ = k * psi.psi(-std::log(T));
    return f;
}

ScalarFunction ScalarFunction::tabulated(std::vector<double> t, std::vector<double> v)
{
    ScalarFunction f;
    f.kind_ = Kind::Tabulated;
    f.table_ = std::make_shared<const Pchip>(std::move(t), std::move(v));
    return f;
}

bool ScalarFunction::has_limit_at_zero() const
{
    switch (kind_) {
    case Kind::HolderSingular: return amp_ == 0.0;
    case Kind::PsiSingular: return amp_ == 0.0 || std::isfinite(psi_.chi());
    default: return true;
    }
}

double ScalarFunction::phase(double t) const
{
    switch (kind_) {
    case Kind::HolderSingular: return std::pow(t, -q_);
    case Kind::PsiSingular:
        if (t >= kInvE) return -k_ * std::numbers::e * psi_.dpsi(1.0) * (T_ - t);
        if (t <= 0.0) return -k_ * psi_.chi() + phi_splice_;
        return -k_ * psi_.psi(-std::log(t)) + phi_splice_;
    default: return 0.0;
    }
}

double ScalarFunction::phase_rate(double t) const
{
    switch (kind_) {
    case Kind::HolderSingular: return -q_ * std::pow(t, -q_ - 1.0);
    case Kind::PsiSingular:
        if (t >= kInvE) return k_ * std::numbers::e * psi_.dpsi(1.0);
        return k_ * psi_.dpsi(-std::log(t)) / t;
    default: return 0.0;
    }
}

double ScalarFunction::operator()(double t) const
{
    switch (kind_) {
    case Kind::Constant: return c0_;
    case Kind::Linear: return c0_ + c1_ * t;
    case Kind::Tabulated: return (*table_)(t);
    case Kind::HolderSingular:
    case Kind::PsiSingular:
        if (amp_ == 0.0) return c0_;
        if (t <= 0.0) {
            if (t == 0.0 && has_limit_at_zero()) return c0_ + amp_ * std::sin(phase(0.0));
            throw DomainError("coefficient has no limit at t = 0; start at a positive t_min");
        }
        return c0_ + amp_ * std::sin(phase(t));
    }
    return c0_;
}

std::pair<double, double> ScalarFunction::range(double t_lo, double t_hi) const
{
    switch (kind_) {
    case Kind::Constant: return {c0_, c0_};
    case Kind::Linear: {
        const double a = c0_ + c1_ * t_lo, b = c0_ + c1_ * t_hi;
        return {std::min(a, b), std::max(a, b)};
    }
    case Kind::Tabulated: {
        const auto [lo, hi] = std::minmax_element(table_->y().begin(), table_->y().end());
        return {*lo, *hi};
    }
    default: return {c0_ - std::abs(amp_), c0_ + std::abs(amp_)};
    }
}

ScalarFunction load_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open coefficient table: " + path);
    std::vector<double> t, v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream is(line);
        double a, b;
        if (!(is >> a)) continue;
        if (!(is >> b)) throw ValidationError(path + ":" + std::to_string(lineno) + ": expected two columns");
        t.push_back(a);
        v.push_back(b);
    }
    return ScalarFunction::tabulated(std::move(t), std::move(v));
}

// ---------------------------------------------------------------------------------------------
// CoefficientField

CoefficientField CoefficientField::scalar(ScalarFunction a, double T)
{
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("field.T must be positive");
    CoefficientField f;
    f.n = 1;
    f.T = T;
    const auto [lo, hi] = a.range(0.0, T);
    if (!(lo > 0.0)) throw ValidationError("field is not strictly hyperbolic (lower bound <= 0)");
    f.lambda0 = lo;
    f.Lambda0 = hi;
    f.sup_norm = std::max(std::abs(lo), std::abs(hi));
    f.entries.push_back(std::move(a));
    return f;
}

CoefficientField CoefficientField::matrix(std::size_t n, std::vector<ScalarFunction> entries, double T)
{
    if (n == 0 || entries.size() != n * n) throw ValidationError("field: need n*n entries");
    if (n == 1) return scalar(std::move(entries.front()), T);
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("field.T must be positive");
    CoefficientField f;
    f.n = n;
    f.T = T;
    f.entries = std::move(entries);
    const auto ts = log_space(T * 1e-6, T, 257);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (double t : ts) {
                const double a = f.entry(i, j)(t), b = f.entry(j, i)(t);
                if (std::abs(a - b) > 1e-14 * std::max(1.0, std::abs(a)))
                    throw ValidationError("field entries are not symmetric");
            }
    const auto rep = check_hyperbolicity(f, ts, sphere_samples(n, 64));
    if (!rep.pass) throw ValidationError("field is not strictly hyperbolic on the sample grid");
    f.lambda0 = rep.lambda_hat;
    f.Lambda0 = rep.Lambda_hat;
    f.sup_norm = std::max(std::abs(rep.lambda_hat), std::abs(rep.Lambda_hat));
    return f;
}

bool CoefficientField::has_limit_at_zero() const
{
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.has_limit_at_zero(); });
}

bool CoefficientField::oscillatory() const
{
    return std::any_of(entries.begin(), entries.end(), [](const auto& e) { return e.oscillatory(); });
}

std::vector<double> symbol_weights(const CoefficientField& field, std::span<const double> xi)
{
    if (xi.size() != field.n) throw DomainError("symbol: xi has the wrong dimension");
    double norm2 = 0.0;
    for (double v : xi) norm2 += v * v;
    if (!(norm2 > 0.0)) throw DomainError("symbol: xi must be nonzero");
    std::vector<double> w(field.n * field.n);
    for (std::size_t i = 0; i < field.n; ++i)
        for (std::size_t j = 0; j < field.n; ++j) w[i * field.n + j] = xi[i] * xi[j] / norm2;
    return w;
}

double symbol(const CoefficientField& field, double t, std::span<const double> xi)
{
    if (t < 0.0 || t > field.T) throw DomainError("symbol: t outside [0, T]");
    if (field.n == 1) {
        if (xi.size() != 1 || xi[0] == 0.0) throw DomainError("symbol: xi must be a nonzero scalar");
        return field.entries[0](t);
    }
    const auto w = symbol_weights(field, xi);
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
        if (w[k] != 0.0) s += w[k] * field.entries[k](t);
    return s;
}

HyperbolicityReport check_hyperbolicity(const CoefficientField& field, std::span<const double> t_grid,
                                        const std::vector<std::vector<double>>& xi_grid)
{
    if (t_grid.empty() || xi_grid.empty()) throw DomainError("check_hyperbolicity: empty grid");
    HyperbolicityReport rep;
    rep.lambda_hat = kInf;
    rep.Lambda_hat = -kInf;
    for (const auto& xi : xi_grid) {
        for (double t : t_grid) {
            const double a = symbol(field, t, xi);
            if (a < rep.lambda_hat) {
                rep.lambda_hat = a;
                rep.t_at_min = t;
                rep.xi_at_min = xi;
            }
            rep.Lambda_hat = std::max(rep.Lambda_hat, a);
        }
    }
    rep.pass = rep.lambda_hat > 0.0;
    return rep;
}

std::vector<std::vector<double>> sphere_samples(std::size_t n, std::size_t extra)
{
    if (n == 1) return {{1.0}};
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> e(n, 0.0);
        e[i] = 1.0;
        out.push_back(e);
    }
    // golden-ratio sequence per coordinate, mapped to [-1, 1] and normalized
    for (std::size_t k = 1; k <= extra; ++k) {
        std::vector<double> v(n);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double frac = std::fmod(static_cast<double>(k) * (0.6180339887498949 + 0.1 * static_cast<double>(i)) +
                                              0.5 * static_cast<double>(i),
                                          1.0);
            v[i] = 2.0 * frac - 1.0;
            norm += v[i] * v[i];
        }
        if (norm < 1e-6) continue;
        for (auto& x : v) x /= std::sqrt(norm);
        out.push_back(v);
    }
    return out;
}

RegularityEstimate estimate_regularity_constant(const CoefficientField& field, const ModulusSpec& mu,
                                                const BlowupSpec& nu, std::span<const double> t_grid,
                                                std::span<const double> tau_grid,
                                                const std::vector<std::vector<double>>& xi_samples)
{
    RegularityEstimate est;
    std::vector<double> mu_v(tau_grid.size());
    for (std::size_t j = 0; j < tau_grid.size(); ++j) {
        const double tau = tau_grid[j];
        mu_v[j] = (tau > 0.0 && tau <= mu.tau0) ? eval_modulus(mu, tau) : 0.0;
    }
    for (const auto& xi : xi_samples) {
        for (double t : t_grid) {
            if (!(t > 0.0) || t > field.T) continue;
            const double at = symbol(field, t, xi);
            const double nu_t = eval_nu(nu, t);
            for (std::size_t j = 0; j < tau_grid.size(); ++j) {
                const double tau = tau_grid[j];
                if (!(mu_v[j] > 0.0) || t + tau > field.T) continue;
                const double r = std::abs(symbol(field, t + tau, xi) - at) * nu_t / mu_v[j];
                if (r > est.C_hat) {
                    est.C_hat = r;
                    est.t_at_max = t;
                    est.tau_at_max = tau;
                }
            }
        }
    }
    return est;
}

std::string to_string(TestFamily kind)
{
    switch (kind) {
    case TestFamily::Constant: return "constant";
    case TestFamily::HolderSingular: return "holder_singular";
    case TestFamily::PsiSingular: return "psi_singular";
    }
    return "constant";
}

Certificate certify(const CoefficientField& field, const ModulusSpec& mu, const BlowupSpec& nu,
                    const CertifyOptions& o)
{
    if (o.points < 2 || !(o.t_min > 0.0) || !(o.tau_min > 0.0)) throw ValidationError("certify: bad grid options");
    Certificate cert;
    cert.mu = mu;
    cert.nu = nu;
    cert.xi_samples = sphere_samples(field.n, o.xi_extra);
    cert.tau0 = std::min(mu.tau0, field.T);
    const auto ts = log_space(std::min(o.t_min, field.T), field.T, o.points);
    const auto taus = log_space(std::min(o.tau_min, cert.tau0), cert.tau0, o.points);
    cert.C = estimate_regularity_constant(field, cert.mu, cert.nu, ts, taus, cert.xi_samples).C_hat;
    cert.nu.kappa = std::max(estimate_doubling(cert.nu, ts), analytic_kappa(cert.nu));
    return cert;
}

CoefficientField make_test_coefficient(TestFamily kind, const TestFamilyParams& p)
{
    if (!(p.T > 0.0)) throw ValidationError("T must be positive");
    CoefficientField field;
    ModulusSpec mu;
    BlowupSpec nu;
    switch (kind) {
    case TestFamily::Constant: {
        field = CoefficientField::scalar(ScalarFunction::constant(p.c), p.T);
        Certificate cert;
        cert.xi_samples = {{1.0}};
        cert.mu = ModulusSpec::holder(1.0, p.T);
        cert.nu = BlowupSpec::constant();
        cert.tau0 = p.T;
        cert.C = 0.0;
        field.certificate = cert;
        return field;
    }
    case TestFamily::HolderSingular:
        if (!(p.p > p.alpha)) throw ValidationError("holder_singular: need p > alpha");
        field = CoefficientField::scalar(ScalarFunction::holder_singular(p.mean, p.amp, p.p / p.alpha - 1.0), p.T);
        mu = ModulusSpec::holder(p.alpha, p.T);
        nu = BlowupSpec::power(p.p);
        break;
    case TestFamily::PsiSingular:
        field = CoefficientField::scalar(ScalarFunction::psi_singular(p.mean, p.amp, p.k, p.psi, p.T), p.T);
        mu = ModulusSpec::psi_derived(p.psi);
        nu = BlowupSpec::psi_derived(p.psi);
        break;
    }
    CertifyOptions o;
    o.t_min = p.cert_t_min;
    o.tau_min = p.cert_tau_min;
    o.points = p.cert_points;
    field.certificate = certify(field, mu, nu, o);
    return field;
}

}  // namespace wellpose
