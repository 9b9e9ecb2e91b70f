#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "wellpose/coefficients.hpp"

namespace wellpose {

/// Even, non-negative, unit-mass kernel supported in [-1, 1].
class MollifierKernel {
public:
    enum class Profile { Bump, Polynomial };

    /// exp(-1/(1 - s^2)), normalized.
    static MollifierKernel bump();
    /// c_k (1 - s^2)^k, normalized; only C^(k-1) at s = +-1.
    static MollifierKernel polynomial(int k);

    double rho(double s) const;
    double drho(double s) const;
    /// Mass of rho on [-1, s].
    double cdf(double s) const;
    /// ||rho'||_{L^1}, computed by quadrature at construction.
    double drho_l1() const { return drho_l1_; }
    bool even() const { return true; }
    Profile profile() const { return profile_; }
    int degree() const { return degree_; }
    double normalization() const { return norm_; }
    /// Frequency beyond which (1 + w)|rho^(w)| stays below 1e-9 (scanned up to 1e4; +inf if never).
    double damping_frequency() const { return damping_; }

private:
    Profile profile_ = Profile::Bump;
    int degree_ = 0;
    double norm_ = 1.0;
    double drho_l1_ = 0.0;
    double damping_ = 0.0;
    std::shared_ptr<const std::vector<double>> cumulative_;  // mass up to each cdf panel edge
};

/// Clamped extension: a(eps) for t <= eps, a(t) on [eps, T], a(T) for t >= T.
double extend(const ScalarFunction& f, double T, double eps, double t);
double extend(const CoefficientField& field, double eps, double t, std::span<const double> xi);
/// n = 1 shorthand.
double extend(const CoefficientField& field, double eps, double t);

/// The pair (extended, mollified) coefficient for one eps.
class MollifiedCoefficient {
public:
    MollifiedCoefficient(CoefficientField field, double eps, MollifierKernel kernel = MollifierKernel::bump(),
                         double tol = 1e-10);

    struct Sample {
        double value = 0.0;
        double derivative = 0.0;
    };

    /// Mollified value and derivative of entry k (row-major) at t.
    Sample entry(std::size_t k, double t) const;
    /// Mollified symbol and its t-derivative.
    Sample evaluate(double t, std::span<const double> xi) const;
    double extended(double t, std::span<const double> xi) const;

    /// For an oscillating entry mean + amp sin(Phi): the integrals of rho_eps(t-u) e^{i Phi(u)} and
    /// rho_eps'(t-u) e^{i Phi(u)} over the unclamped part of the window.
    std::array<std::complex<double>, 2> phase_integrals(std::size_t k, double t) const;

    const CoefficientField& field() const { return field_; }
    double eps() const { return eps_; }
    const MollifierKernel& kernel() const { return kernel_; }
    double tolerance() const { return tol_; }

private:
    CoefficientField field_;
    double eps_;
    MollifierKernel kernel_;
    double tol_;
};

double mollify_value(const MollifiedCoefficient& mc, double t, std::span<const double> xi);
double mollify_derivative(const MollifiedCoefficient& mc, double t, std::span<const double> xi);
/// n = 1 shorthands.
double mollify_value(const MollifiedCoefficient& mc, double t);
double mollify_derivative(const MollifiedCoefficient& mc, double t);

struct ApproximationRow {
    double eps = 0.0;
    double t = 0.0;
    double lhs1 = 0.0;  ///< |a_eps - extended|
    double rhs1 = 0.0;  ///< C' min{1, mu(eps)/nu(t)}
    double lhs2 = 0.0;  ///< |a_eps'|
    double rhs2 = 0.0;  ///< (C''/eps) min{1, mu(eps)/nu(t)}
    bool pass1 = false;
    bool pass2 = false;
};

struct ApproximationOptions {
    double lhs_scale = 1.0;  ///< multiplies both left sides (self-test fixture)
    std::size_t workers = 1;
    double tol = 1e-10;
};

struct ApproximationReport {
    double C = 0.0;
    double kappa = 0.0;      ///< max(estimated, analytic)
    double kappa_hat = 0.0;  ///< grid estimate
    double sup_norm = 0.0;
    double drho_l1 = 0.0;
    double C_prime = 0.0;
    double C_double_prime = 0.0;
    std::vector<ApproximationRow> rows;  ///< eps-major order
    std::size_t failures = 0;
    bool all_pass = false;
    double worst_margin1 = 0.0;  ///< min of rhs1 - lhs1
    double worst_margin2 = 0.0;
};

/// Evaluates both approximation bounds with the explicit constants on the (eps, t) product grid.
ApproximationReport verify_approximation(const CoefficientField& field, const MollifierKernel& kernel,
                           std::span<const double> eps_grid, std::span<const double> t_grid,
                           const ApproximationOptions& options = {});

}  // namespace wellpose
