#pragma once

// Piecewise Chebyshev surrogate of a mollified coefficient and its derivative on [t_lo, t_hi].
//
// Oscillating entries mean + amp sin(Phi) are represented on the unclamped interior [2 eps, T - eps]
// through the slowly varying envelopes B = e^{-i Phi(t)} (rho_eps * e^{i Phi})(t) and
// D = e^{-i Phi(t)} (rho_eps' * e^{i Phi})(t), so the panel count does not grow with the number of
// coefficient oscillations. Everywhere else the value and derivative are interpolated directly.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "wellpose/mollify.hpp"

namespace wellpose {

struct SurrogateOptions {
    std::size_t degree = 16;
    double tol = 1e-10;  ///< absolute tolerance on a_eps; eps-scaled for a_eps'
    int max_depth = 48;
};

class CoefficientSurrogate {
public:
    CoefficientSurrogate(const MollifiedCoefficient& mc, double t_lo, double t_hi, const SurrogateOptions& opt = {});

    /// Mollified value and derivative of entry k at t in [t_lo, t_hi].
    MollifiedCoefficient::Sample entry(std::size_t k, double t) const;
    /// Combination with symbol weights (see symbol_weights).
    MollifiedCoefficient::Sample evaluate(double t, std::span<const double> weights) const;

    std::size_t panels() const;
    long evaluations() const { return evaluations_; }
    bool converged() const { return converged_; }
    double t_lo() const { return t_lo_; }
    double t_hi() const { return t_hi_; }

private:
    struct Panel {
        double lo = 0.0, hi = 0.0;
        bool modulated = false;
        std::vector<std::complex<double>> value, deriv;  // Chebyshev coefficients
    };
    struct Entry {
        bool active = false;
        bool constant = false;
        double c = 0.0;
        std::vector<double> starts;  // panel lower edges
        std::vector<Panel> panels;
    };

    void build(const MollifiedCoefficient& mc, std::size_t k, Entry& e);

    std::size_t n_ = 1;
    std::vector<ScalarFunction> funcs_;
    std::vector<Entry> entries_;
    double t_lo_ = 0.0, t_hi_ = 0.0;
    SurrogateOptions opt_;
    long evaluations_ = 0;
    bool converged_ = true;
};

}  // namespace wellpose
