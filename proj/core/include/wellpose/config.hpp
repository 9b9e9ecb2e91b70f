#pragma once

// Experiment configuration: a single JSON document with tagged records.
//
//   {"name": "...",
//    "field": {"family": "holder_singular", "T": 1, "mean": 2, "amp": 1, "alpha": 0.5, "p": 2},
//    "kernel": {"profile": "bump"},
//    "xi_grid": {"min": 10, "max": 10000, "count": 16},
//    "data": {"profile": "gevrey", "sigma": 1.2, "delta": 1},
//    "model": {"kind": "gevrey", "p": 2, "alpha": 0.5},
//    ...}
//
// Every key is optional except field, xi_grid, data and model; unknown keys are rejected.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wellpose/analysis.hpp"
#include "wellpose/coefficients.hpp"
#include "wellpose/energy.hpp"
#include "wellpose/mollify.hpp"
#include "wellpose/table.hpp"

namespace wellpose {

struct EntryConfig {
    enum class Kind { Constant, Linear, HolderSingular, PsiSingular, Table };
    Kind kind = Kind::Constant;
    double c = 1.0;
    double c0 = 1.0, c1 = 0.0;
    double mean = 2.0, amp = 1.0;
    double q = 3.0;
    double k = 1.0;
    PsiSpec psi = PsiSpec::one_plus_log();
    std::string path;  ///< table file, relative to the config file
};

struct FieldConfig {
    enum class Family { Constant, HolderSingular, PsiSingular, Matrix };
    Family family = Family::Constant;
    TestFamilyParams params{};          ///< the named families
    std::size_t n = 1;                  ///< Matrix
    std::vector<EntryConfig> entries;   ///< Matrix, row-major n x n
    struct CertificateConfig {
        ModulusSpec mu{};
        BlowupSpec nu{};
    };
    std::optional<CertificateConfig> certificate;  ///< Matrix only
    CertifyOptions certify{};
};

struct KernelConfig {
    MollifierKernel::Profile profile = MollifierKernel::Profile::Bump;
    int degree = 4;
};

struct XiGridConfig {
    double min = 10.0;
    double max = 1e4;
    std::size_t count = 16;
};

struct DataConfig {
    enum class Profile { Constant, Gevrey, Gaussian };
    Profile profile = Profile::Constant;
    double sigma = 1.0;  ///< Gevrey: u0 = exp(-delta |xi|^(1/sigma))
    double delta = 1.0;
    double width = 1.0;  ///< Gaussian: u0 = exp(-|xi|^2 / (2 width^2))
};

struct ModelConfig {
    ExponentModel::Kind kind = ExponentModel::Kind::Gevrey;
    double p = 2.0;
    double alpha = 0.5;
    PsiSpec psi = PsiSpec::one_plus_log();
};

struct SolverConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double t_start = 0.0;
    std::size_t samples = 65;
    double step_factor = 0.1;
};

struct QuadratureConfig {
    double tol = 1e-8;            ///< Gronwall integral, absolute
    double mollify_tol = 1e-10;   ///< mollifier entries
};

struct ApproximationConfig {
    double eps_min = 1e-3;
    double eps_max = 1e-1;
    std::size_t eps_count = 64;
    double t_min = 1e-5;
    std::size_t t_count = 64;  ///< log-spaced up to T
};

struct DecayConfig {
    DecayOptions::Kind kind = DecayOptions::Kind::Gevrey;
    double min_xi = 10.0;
    std::vector<double> zetas{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
};

struct OutputConfig {
    std::string dir = "out";
    TableFormat format = TableFormat::Csv;
};

struct ExperimentConfig {
    std::string name = "experiment";
    FieldConfig field{};
    KernelConfig kernel{};
    XiGridConfig xi_grid{};
    DataConfig data{};
    ModelConfig model{};
    SolverConfig solver{};
    QuadratureConfig quadrature{};
    ApproximationConfig approximation{};
    GrowthFitOptions fit{};
    DecayConfig decay{};
    OutputConfig output{};
    std::size_t workers = 1;
    std::string base_dir = ".";  ///< directory of the config file (not serialized)
};

/// Parses and checks the invariants; ValidationError messages start with the offending key path.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);
/// Canonical JSON text with every field spelled out.
std::string serialize_config(const ExperimentConfig& config);

/// Checks the cross-field invariants (count >= 8, tolerances > 0, ...).
void validate_config(const ExperimentConfig& config);

/// Builds the coefficient field (certified for the named families and when a certificate is given).
CoefficientField build_field(const ExperimentConfig& config);
MollifierKernel build_kernel(const KernelConfig& kernel);
ExponentModel build_model(const ExperimentConfig& config, const CoefficientField& field);

/// Log of the data amplitude u0 at |xi| (u1 = 0 for every profile).
double log_data_amplitude(const DataConfig& data, double xi);

}  // namespace wellpose
