#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wellpose/moduli.hpp"

namespace wellpose {

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes), clamped outside the knots.
class Pchip {
public:
    Pchip(std::vector<double> x, std::vector<double> y);
    double operator()(double t) const;
    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }

private:
    std::vector<double> x_, y_, d_;
};

/// One scalar time-function a_ij(t) on [0, T].
///
/// The oscillating families have the form mean + amp sin(Phi(t)) with a known phase:
///   holder_singular: Phi(t) = t^-q
///   psi_singular:    Phi' = k / nu(t), Phi(T) = 0, nu the psi-derived blow-up rate
class ScalarFunction {
public:
    enum class Kind { Constant, Linear, HolderSingular, PsiSingular, Tabulated };

    static ScalarFunction constant(double c);
    static ScalarFunction linear(double c0, double c1);
    static ScalarFunction holder_singular(double mean, double amp, double q);
    static ScalarFunction psi_singular(double mean, double amp, double k, const PsiSpec& psi, double T);
    static ScalarFunction tabulated(std::vector<double> t, std::vector<double> v);

    double operator()(double t) const;

    Kind kind() const { return kind_; }
    bool oscillatory() const { return kind_ == Kind::HolderSingular || kind_ == Kind::PsiSingular; }
    bool has_limit_at_zero() const;
    double mean() const { return c0_; }
    double amplitude() const { return amp_; }
    double phase(double t) const;
    double phase_rate(double t) const;

    /// Lower and upper bounds of the function on [t_lo, t_hi] (exact for closed forms).
    std::pair<double, double> range(double t_lo, double t_hi) const;

    // parameters, exposed for serialization
    double c0() const { return c0_; }
    double c1() const { return c1_; }
    double q() const { return q_; }
    double k() const { return k_; }
    double horizon() const { return T_; }
    const PsiSpec& psi() const { return psi_; }
    const Pchip* table() const { return table_.get(); }

private:
    Kind kind_ = Kind::Constant;
    double c0_ = 0.0;   // constant value, intercept, or mean
    double c1_ = 0.0;   // slope
    double amp_ = 0.0;
    double q_ = 0.0;
    double k_ = 0.0;
    double T_ = 1.0;
    PsiSpec psi_{};
    double phi_splice_ = 0.0;  // psi_singular: phase offset of the t <= e^-1 branch
    std::shared_ptr<const Pchip> table_;
};

/// Reads a two-column (t, value) whitespace-separated table; '#' starts a comment.
ScalarFunction load_table(const std::string& path);

/// Empirical regularity record |a(t+tau) - a(t)| <= (C / nu(t)) mu(tau) for tau <= tau0.
struct Certificate {
    double C = 0.0;
    ModulusSpec mu{};
    BlowupSpec nu{};
    double tau0 = 1.0;
    std::vector<std::vector<double>> xi_samples;  ///< unit vectors the sup was taken over
};

/// Symmetric n x n matrix of time-functions with strict hyperbolicity bounds.
struct CoefficientField {
    std::size_t n = 1;
    std::vector<ScalarFunction> entries;  ///< row-major n x n
    double T = 1.0;
    double lambda0 = 1.0;
    double Lambda0 = 1.0;
    double sup_norm = 1.0;
    std::optional<Certificate> certificate;

    /// n = 1 field; bounds from the exact range of the entry.
    static CoefficientField scalar(ScalarFunction a, double T);
    /// General field; checks symmetry and estimates bounds on sample grids.
    static CoefficientField matrix(std::size_t n, std::vector<ScalarFunction> entries, double T);

    const ScalarFunction& entry(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
    bool has_limit_at_zero() const;
    bool oscillatory() const;
    /// Upper bound of tau for the regularity modulus (certificate tau0, else T).
    double tau0() const { return certificate ? certificate->tau0 : T; }
};

/// a(t, xi) = sum a_ij(t) xi_i xi_j / |xi|^2.
double symbol(const CoefficientField& field, double t, std::span<const double> xi);

/// Weights xi_i xi_j / |xi|^2 in row-major order; throws DomainError for xi = 0.
std::vector<double> symbol_weights(const CoefficientField& field, std::span<const double> xi);

struct HyperbolicityReport {
    double lambda_hat = 0.0;
    double Lambda_hat = 0.0;
    bool pass = false;
    double t_at_min = 0.0;
    std::vector<double> xi_at_min;
};

HyperbolicityReport check_hyperbolicity(const CoefficientField& field, std::span<const double> t_grid,
                                        const std::vector<std::vector<double>>& xi_grid);

/// Unit-sphere sample: the axes plus `extra` deterministic directions (n = 1 gives {1}).
std::vector<std::vector<double>> sphere_samples(std::size_t n, std::size_t extra = 16);

struct RegularityEstimate {
    double C_hat = 0.0;
    double t_at_max = 0.0;
    double tau_at_max = 0.0;
};

/// sup of |a(t+tau,xi) - a(t,xi)| nu(t) / mu(tau) over the grid pairs with t + tau <= T, tau <= tau0.
RegularityEstimate estimate_regularity_constant(const CoefficientField& field, const ModulusSpec& mu,
                                                const BlowupSpec& nu, std::span<const double> t_grid,
                                                std::span<const double> tau_grid,
                                                const std::vector<std::vector<double>>& xi_samples);

struct CertifyOptions {
    double t_min = 1e-4;     ///< smallest t on the log-spaced grid
    double tau_min = 1e-10;  ///< smallest tau on the log-spaced grid
    std::size_t points = 512;
    std::size_t xi_extra = 16;  ///< extra unit-sphere directions for n > 1
};

/// Empirical certificate: C from estimate_regularity_constant, tau0 = min(mu.tau0, T), kappa floored
/// at the family's closed form.
Certificate certify(const CoefficientField& field, const ModulusSpec& mu, const BlowupSpec& nu,
                    const CertifyOptions& options = {});

enum class TestFamily { Constant, HolderSingular, PsiSingular };

struct TestFamilyParams {
    double T = 1.0;
    double c = 1.0;        ///< constant family value
    double mean = 2.0;     ///< oscillating families
    double amp = 1.0;
    double alpha = 0.5;    ///< holder_singular: modulus exponent
    double p = 2.0;        ///< holder_singular: blow-up power
    PsiSpec psi = PsiSpec::one_plus_log();
    double k = 1.0;        ///< psi_singular: phase speed factor
    double cert_t_min = 1e-4;     ///< smallest t on the certification grid
    double cert_tau_min = 1e-10;  ///< smallest tau on the certification grid
    std::size_t cert_points = 512;
};

/// Builds a test field with bounds and an empirically certified (C, mu, nu, tau0) record.
CoefficientField make_test_coefficient(TestFamily kind, const TestFamilyParams& params);

std::string to_string(TestFamily kind);

}  // namespace wellpose
