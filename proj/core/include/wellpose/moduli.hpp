#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wellpose {

/// Profile functions psi on [1, inf) generating a modulus and a blow-up rate.
struct PsiSpec {
    enum class Family { Identity, OneMinusExp, OnePlusLog, PowerBeta };
    Family family = Family::Identity;
    double alpha = 1.0;  ///< OneMinusExp parameter in (0, 1]
    double beta = 1.0;   ///< PowerBeta parameter in (0, 1]

    static PsiSpec identity() { return {}; }
    static PsiSpec one_minus_exp(double alpha);
    static PsiSpec one_plus_log();
    static PsiSpec power_beta(double beta);

    double psi(double r) const;
    double dpsi(double r) const;
    /// log psi'(r), finite even where psi'(r) underflows.
    double log_dpsi(double r) const;
    /// lim psi(r) as r -> inf (+inf when unbounded).
    double chi() const;
    /// lim psi'(r) as r -> inf.
    double eta() const;
    std::string name() const;
};

struct ModulusSpec {
    enum class Family { Holder, PsiDerived, Custom };
    Family family = Family::Holder;
    double alpha = 1.0;
    PsiSpec psi{};
    double tau0 = 1.0;
    std::vector<double> tau_samples;  ///< Custom: ascending, piecewise-linear knots
    std::vector<double> mu_samples;

    static ModulusSpec holder(double alpha, double tau0 = 1.0);
    /// tau0 is chosen by bisection as the largest tau <= e^-1 for which the grid checks pass.
    static ModulusSpec psi_derived(const PsiSpec& psi, std::size_t grid_points = 512);
    static ModulusSpec custom(std::vector<double> tau, std::vector<double> mu);
    std::string name() const;
};

struct BlowupSpec {
    enum class Family { Power, PsiDerived, Constant };
    Family family = Family::Constant;
    double p = 0.0;
    PsiSpec psi{};
    double kappa = 1.0;  ///< doubling constant nu(t/2) >= kappa nu(t)

    static BlowupSpec power(double p);
    static BlowupSpec psi_derived(const PsiSpec& psi);
    static BlowupSpec constant();
    std::string name() const;
};

double eval_modulus(const ModulusSpec& spec, double tau);
double eval_nu(const BlowupSpec& spec, double t);

/// Closed-form doubling constant of the family: 2^-p, 1/2 or 1.
double analytic_kappa(const BlowupSpec& spec);

/// min over the grid of nu(t/2)/nu(t).
double estimate_doubling(const BlowupSpec& spec, std::span<const double> t_grid);
double estimate_doubling(const std::function<double(double)>& nu, std::span<const double> t_grid);

struct ValidationReport {
    bool pass = true;
    std::string message;
    std::optional<std::pair<double, double>> violation;  ///< first offending pair
};

/// Strict monotonicity and midpoint concavity over all grid pairs.
ValidationReport validate_modulus(const ModulusSpec& spec, std::span<const double> grid);

struct PsiReport {
    bool pass = true;
    std::string message;
    std::optional<double> violation;  ///< r at which a check first failed
    double chi_estimate = 0.0;        ///< psi(r_max)
    bool chi_unbounded = false;       ///< psi still growing at r_max
    double eta_estimate = 0.0;        ///< psi'(r_max)
};

/// psi increasing, psi' non-increasing, e^r psi' non-decreasing on the grid, plus tail estimates.
PsiReport validate_psi(const PsiSpec& spec, std::span<const double> r_grid);

/// {0} followed by log-spaced points accumulating at 0, ending at tau0.
std::vector<double> default_modulus_grid(double tau0, std::size_t n = 512);
/// Log-spaced points on [1, r_max].
std::vector<double> default_psi_grid(std::size_t n = 512, double r_max = 1e8);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace wellpose
