#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wellpose/energy.hpp"

namespace wellpose {

/// One sweep point: |xi| and log(E(T) / E(t_start)).
struct GrowthSample {
    double xi = 0.0;
    double log_ratio = 0.0;
};

struct GrowthFitOptions {
    double slack = 0.25;
    double min_decades = 2.0;
    std::size_t min_points = 8;
    /// Absolute allowance added to the sup-ratio threshold (flat sweeps have ratios at rounding level).
    double floor = 1e-6;
};

struct GrowthFit {
    ExponentModel::Kind kind = ExponentModel::Kind::Gevrey;
    double slope = 0.0;      ///< regression M-hat: y ~ intercept + slope * shape
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> xi;
    std::vector<double> shape;      ///< 1 + 4|xi|^((p-alpha)/p) or 1 + log|xi|
    std::vector<double> ratios;     ///< y / shape
    std::vector<double> residuals;  ///< y - (intercept + slope * shape)
    double sup_ratio = 0.0;         ///< max over the grid of y / shape (sup M-hat)
    double head_sup_ratio = 0.0;    ///< the same over |xi| <= xi_max / 10
    double threshold = 0.0;         ///< (1 + slack) head_sup_ratio + floor
    double slack = 0.25;
    bool consistent = false;
};

/// Least-squares fit of the growth exponents against the model shape and the bounded-sup verdict:
/// consistent iff the sup-ratio over the whole grid stays below the threshold set by the grid with its
/// last decade removed.
GrowthFit fit_growth(std::span<const GrowthSample> samples, const ExponentModel& model,
                     const GrowthFitOptions& options = {});

/// |xi| and the log of max(|u|, |u_t| / |xi|); -inf for a zero state.
struct DecaySample {
    double xi = 0.0;
    double log_magnitude = 0.0;
};

DecaySample decay_sample(double xi, std::complex<double> u, std::complex<double> ut);

struct DecayOptions {
    enum class Kind { Gevrey, Polynomial };
    Kind kind = Kind::Gevrey;
    double sigma = 1.0;
    std::vector<double> zetas{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    double min_xi = 1.0;        ///< samples below are left out of the fit
    double xi_threshold = 1.0;  ///< every sample must satisfy |xi| >= xi_threshold
};

struct DecayProfile {
    DecayOptions::Kind kind = DecayOptions::Kind::Gevrey;
    std::vector<DecaySample> samples;  ///< the samples used
    // Gevrey: log m ~ log K - delta |xi|^(1/sigma)
    double sigma = 1.0;
    double K = 0.0;
    double log_K = 0.0;
    double delta = 0.0;
    double r_squared = 0.0;
    // Polynomial: K_zeta = max m |xi|^zeta
    std::vector<double> zetas;
    std::vector<double> log_K_zeta;
    std::vector<double> K_zeta;
    std::vector<bool> zeta_pass;  ///< m |xi|^zeta non-increasing over the last sample pair
    bool pass = false;
};

DecayProfile check_decay(std::span<const DecaySample> samples, const DecayOptions& options = {});

struct Classification {
    ExponentModel::Kind kind = ExponentModel::Kind::Gevrey;
    std::string verdict;  ///< "gevrey well-posed" or "C-infinity well-posed"
    double M_slope = 0.0;
    double M_sup = 0.0;
    // Gevrey
    double p = 0.0;
    double alpha = 0.0;
    double sigma_star = 0.0;
    std::string sigma_star_fraction;  ///< e.g. "4/3"; empty when not a small rational
    double data_sigma = 0.0;
    bool decay_preserved = false;     ///< data index below sigma* with a passing decay fit
    std::string limit_note;
    // LogPsi
    std::string psi;
    std::string modulus_note;
    std::vector<double> zetas;
    std::vector<double> thetas;       ///< zeta - M_sup
    std::vector<std::string> notes;
};

/// Prediction of the preserved data class; refuses inconsistent fits with DomainError.
Classification classify(const GrowthFit& fit, const ExponentModel& model, const DecayProfile& decay);

/// "n/d" for d <= 1000 when x matches to 1e-12 relative, else "".
std::string small_fraction(double x);

/// Closed-form modulus of a psi-derived family, e.g. "τ|log τ|/(1+log|log τ|)".
std::string modulus_formula(const PsiSpec& psi);

}  // namespace wellpose
