#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "wellpose/coefficients.hpp"
#include "wellpose/mollify.hpp"
#include "wellpose/surrogate.hpp"

namespace wellpose {

struct ModeState {
    std::complex<double> u{};
    std::complex<double> ut{};
    double t = 0.0;
    std::vector<double> xi;
};

double xi_norm(std::span<const double> xi);

struct SolverStats {
    long steps = 0;
    long rejected = 0;
    long evaluations = 0;
    double max_error = 0.0;  ///< largest normalized local error estimate (<= 1 when converged)
};

/// Time series of one Fourier mode. energy and gronwall are filled by attach_energy/attach_gronwall.
struct EnergyTrace {
    std::vector<double> xi;
    double eps = 0.0;
    std::vector<double> t;
    std::vector<std::complex<double>> u;
    std::vector<std::complex<double>> ut;
    std::vector<double> energy;    ///< E_eps at each sample
    std::vector<double> gronwall;  ///< cumulative Gronwall integral from t.front()
    SolverStats stats;

    ModeState state(std::size_t i) const { return {u[i], ut[i], t[i], xi}; }
    std::size_t size() const { return t.size(); }
};

struct ModeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double t_start = 0.0;
    std::size_t samples = 65;   ///< uniform output samples on [t_start, T] when times is empty
    std::vector<double> times;  ///< explicit output times (ascending, inside [t_start, T])
    double step_factor = 0.1;   ///< step ceiling step_factor / (|xi| sqrt(Lambda0))
};

/// Solves u'' + a(t, xi)|xi|^2 u = 0 with the original coefficient from t_start to T.
EnergyTrace integrate_mode(const CoefficientField& field, std::span<const double> xi, std::complex<double> u0,
                           std::complex<double> u1, double T, const ModeOptions& opt = {});

/// a_eps |xi|^2 |u|^2 + |u_t|^2.
double approximate_energy(const ModeState& state, const MollifiedCoefficient& mc);
/// |u_t|^2 + |xi|^2 |u|^2.
double flat_energy(const ModeState& state);

void attach_energy(EnergyTrace& trace, const MollifiedCoefficient& mc);

/// |a_eps'|/a_eps + |xi| |a_eps - a| / sqrt(a_eps), evaluated directly from the mollifier.
double gronwall_integrand(double t, std::span<const double> xi, const CoefficientField& field,
                          const MollifiedCoefficient& mc);

struct GronwallOptions {
    double tol = 1e-9;     ///< absolute tolerance on the integral
    double t_start = 0.0;  ///< lower integration limit
    SurrogateOptions surrogate{};
    std::vector<double> breakpoints;  ///< extra split points
    int root_samples = 8;             ///< sign-change probes per chunk
    /// Starting at t = 0 with a coefficient oscillating without limit: below the time where
    /// 1/(t |Phi'(t)|) drops under this value the integrand is replaced by its phase average.
    double average_rtol = 1e-3;
};

struct GronwallResult {
    double total = 0.0;
    std::vector<double> cumulative;  ///< integral from t_start to each requested time
    double error = 0.0;
    long evaluations = 0;
    std::size_t surrogate_panels = 0;
    bool converged = true;
};

/// Integral of the Gronwall integrand from opt.t_start to each of the ascending times.
///
/// With t_start = 0 and a coefficient A sin(Phi) + smooth that has no limit at 0, the layer near 0 is
/// handled by phase averaging (Phi' t -> inf) or by a bounded-integrand remainder (slow phases).
/// Requested times inside that layer are rejected.
GronwallResult gronwall_cumulative(const MollifiedCoefficient& mc, std::span<const double> xi,
                                   std::span<const double> times, const GronwallOptions& opt = {});

/// Integral over [opt.t_start, T] at the given eps.
GronwallResult gronwall_bound(const CoefficientField& field, std::span<const double> xi, double eps,
                              const GronwallOptions& opt = {},
                              const MollifierKernel& kernel = MollifierKernel::bump());

void attach_gronwall(EnergyTrace& trace, const MollifiedCoefficient& mc, const GronwallOptions& opt = {});

struct ExponentModel {
    enum class Kind { Gevrey, LogPsi };
    Kind kind = Kind::Gevrey;
    double p = 2.0;
    double alpha = 0.5;
    PsiSpec psi{};
    double M = 1.0;
    double M_prime = 0.0;         ///< LogPsi split M = M' + M''
    double M_double_prime = 0.0;
    double tau1 = 1.0;            ///< min{tau0, T, e^-1}

    static ExponentModel gevrey(double p, double alpha, double M);
    static ExponentModel log_psi(const PsiSpec& psi, double M, double tau1);

    /// p / (p - alpha).
    double sigma_star() const;
    /// (p - alpha) / p.
    double gevrey_exponent() const;
    /// Smallest |xi| for which the model applies.
    double xi_threshold() const;
    /// Exponent shape without M: 1 + 4|xi|^((p-alpha)/p) or 1 + log|xi|.
    double shape(double xi) const;
};

/// M + 4M|xi|^((p-alpha)/p) or M(1 + log|xi|).
double theoretical_exponent(const ExponentModel& model, double xi);

struct RatioBound {
    double value = 0.0;      ///< may be +inf on overflow
    double log_value = 0.0;
};

/// Admissible growth factor of the flat energy |u_t|^2 + |xi|^2|u|^2.
RatioBound energy_ratio_bound(const ExponentModel& model, double lambda0, double Lambda0, double xi);

/// Model with M assembled from the certificate constants (kernel norms, C, kappa, hyperbolicity bounds).
ExponentModel analytic_model(const CoefficientField& field, ExponentModel::Kind kind,
                             const MollifierKernel& kernel = MollifierKernel::bump());

/// tau1 = min{tau0, T, e^-1} of a certified field.
double tau_one(const CoefficientField& field);

}  // namespace wellpose
