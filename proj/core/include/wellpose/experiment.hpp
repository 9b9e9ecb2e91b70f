#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "wellpose/analysis.hpp"
#include "wellpose/config.hpp"
#include "wellpose/table.hpp"

namespace wellpose {

enum class Stage { Validate, Certify, MollifyVerify, Sweep, Classify, All };

Stage parse_stage(const std::string& verb);

/// eps = min(1/|xi|, tau1).
double coupled_eps(double xi, double tau1);

struct SweepRow {
    double xi = 0.0;
    double eps = 0.0;
    double E0 = 0.0;               ///< approximate energy at t_start, unit data
    double ET = 0.0;               ///< approximate energy at T, unit data
    double log_ratio = 0.0;        ///< log(ET / E0)
    double gronwall_total = 0.0;   ///< Gronwall integral over [0, T]
    double exponent_model_value = 0.0;  ///< M_emp * shape(xi)
    double ratio = 0.0;            ///< gronwall_total / shape(xi)
    double flat_log_ratio = 0.0;   ///< log of the flat-energy growth
    double flat_log_bound = 0.0;   ///< log of energy_ratio_bound at M_emp
    double log_data = 0.0;         ///< log u0 of the data profile
    double log_magnitude_T = 0.0;  ///< log max(|u|, |u_t|/|xi|) at T for the actual data
    double dominance_margin = 0.0; ///< min over samples of log(E0 e^G (1 + 1e-5) / E)
    bool eps_clamped = false;
    bool dominance_pass = false;
    bool flat_bound_pass = false;
};

struct SweepError {
    double xi = 0.0;
    std::string message;
};

struct SweepResult {
    std::vector<SweepRow> rows;      ///< successful rows in grid order
    std::vector<SweepError> errors;  ///< failed grid points in grid order
    double M_empirical = 0.0;        ///< sup of gronwall_total / shape
    double tau1 = 0.0;
};

struct PipelineContext {
    ExperimentConfig config;
    CoefficientField field;
    MollifierKernel kernel;
    ExponentModel model;
};

/// Builds field, kernel and model; checks the start-time rule.
PipelineContext prepare(const ExperimentConfig& config);

SweepResult run_sweep(const PipelineContext& ctx, std::size_t workers, std::ostream* log = nullptr);
ApproximationReport run_approximation(const PipelineContext& ctx, std::size_t workers);

Table sweep_table(const SweepResult& sweep);
Table approximation_table(const ApproximationReport& report);
Table ratios_table(const GrowthFit& fit);
Table decay_table(const DecayProfile& decay);

std::vector<GrowthSample> growth_samples(const SweepResult& sweep);
/// Rows at |xi| >= xi_threshold (the decay classes are stated above the model threshold).
std::vector<DecaySample> decay_samples(const SweepResult& sweep, double xi_threshold = 0.0);
DecayOptions decay_options(const PipelineContext& ctx);

std::string validation_json(const PipelineContext& ctx);
std::string certificate_json(const PipelineContext& ctx);
std::string classification_json(const Classification& c, const GrowthFit& fit, const DecayProfile& decay);

struct RunOptions {
    std::string out_dir;
    TableFormat format = TableFormat::Csv;
    std::size_t workers = 1;
    std::ostream* log = nullptr;
};

struct RunSummary {
    std::vector<std::string> files;  ///< written, in order
    std::size_t sweep_errors = 0;
    bool approximation_pass = true;
    bool refused = false;            ///< classification refused an inconsistent fit
    /// true when any numerical check failed (exit code 2)
    bool numerical_failure() const { return sweep_errors > 0 || !approximation_pass || refused; }
};

/// Validates, then runs the stage (Classify includes the sweep; All runs every stage) and writes the outputs.
RunSummary run_experiment(const ExperimentConfig& config, Stage stage, const RunOptions& options);

}  // namespace wellpose
