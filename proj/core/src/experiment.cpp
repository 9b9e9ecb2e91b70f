#include "wellpose/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "wellpose/error.hpp"
#include "wellpose/grid.hpp"
#include "wellpose/parallel.hpp"

namespace wellpose {

using ojson = nlohmann::ordered_json;

namespace {

constexpr double kDominanceSlack = 1e-5;

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    out.close();
    if (!out) throw IoError("write failed: " + path);
}

ojson finite_or_null(double x)
{
    return std::isfinite(x) ? ojson(x) : ojson(nullptr);
}

ojson modulus_json(const ModulusSpec& mu)
{
    ojson j{{"name", mu.name()}, {"tau0", mu.tau0}};
    if (mu.family == ModulusSpec::Family::PsiDerived) j["formula"] = modulus_formula(mu.psi);
    return j;
}

SweepRow solve_point(const PipelineContext& ctx, double xi, double tau1)
{
    const ExperimentConfig& c = ctx.config;
    const std::vector<double> xv{xi};
    SweepRow row;
    row.xi = xi;
    row.eps = coupled_eps(xi, tau1);
    row.eps_clamped = 1.0 / xi > tau1;
    row.log_data = log_data_amplitude(c.data, xi);

    ModeOptions mo;
    mo.rtol = c.solver.rtol;
    mo.atol = c.solver.atol;
    mo.t_start = c.solver.t_start;
    mo.samples = c.solver.samples;
    mo.step_factor = c.solver.step_factor;
    // unit data; the profile amplitude enters through log_data (the mode equation is linear)
    EnergyTrace trace = integrate_mode(ctx.field, xv, 1.0, 0.0, ctx.field.T, mo);
    const MollifiedCoefficient mc(ctx.field, row.eps, ctx.kernel, c.quadrature.mollify_tol);
    attach_energy(trace, mc);
    GronwallOptions go;
    go.tol = c.quadrature.tol;
    attach_gronwall(trace, mc, go);

    row.E0 = trace.energy.front();
    row.ET = trace.energy.back();
    row.log_ratio = std::log(row.ET / row.E0);
    row.dominance_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double m = std::log(row.E0) + trace.gronwall[i] + std::log1p(kDominanceSlack) - std::log(trace.energy[i]);
        row.dominance_margin = std::min(row.dominance_margin, m);
    }
    row.dominance_pass = row.dominance_margin >= 0.0;
    row.flat_log_ratio = std::log(flat_energy(trace.state(trace.size() - 1)) / flat_energy(trace.state(0)));

    const double mag = std::max(std::abs(trace.u.back()), std::abs(trace.ut.back()) / xi);
    row.log_magnitude_T = row.log_data + (mag > 0.0 ? std::log(mag) : -std::numeric_limits<double>::infinity());

    if (c.solver.t_start == 0.0) {
        row.gronwall_total = trace.gronwall.back();
    } else {
        const double times[1] = {ctx.field.T};
        GronwallOptions g0 = go;
        g0.t_start = 0.0;
        const auto full = gronwall_cumulative(mc, xv, times, g0);
        if (!full.converged) throw NumericalError("Gronwall quadrature over [0, T] did not converge", full.error);
        row.gronwall_total = full.total;
    }
    return row;
}

}  // namespace

Stage parse_stage(const std::string& verb)
{
    if (verb == "validate") return Stage::Validate;
    if (verb == "certify") return Stage::Certify;
    if (verb == "mollify-verify") return Stage::MollifyVerify;
    if (verb == "sweep") return Stage::Sweep;
    if (verb == "classify") return Stage::Classify;
    if (verb == "all") return Stage::All;
    throw ValidationError("unknown verb '" + verb + "'");
}

double coupled_eps(double xi, double tau1)
{
    if (!(xi > 0.0)) throw DomainError("coupled_eps: |xi| must be positive");
    return std::min(1.0 / xi, tau1);
}

PipelineContext prepare(const ExperimentConfig& config)
{
    validate_config(config);
    PipelineContext ctx{config, build_field(config), build_kernel(config.kernel), {}};
    if (!ctx.field.has_limit_at_zero() && config.solver.t_start == 0.0)
        throw ValidationError("solver.t_start: the coefficient has no limit at t = 0; set a positive start time");
    try {
        ctx.model = build_model(config, ctx.field);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("model: ") + e.what());
    }
    if (config.xi_grid.min < ctx.model.xi_threshold() * (1.0 - 1e-12))
        throw ValidationError("xi_grid.min: below the model threshold " + format_double(ctx.model.xi_threshold()));
    return ctx;
}

SweepResult run_sweep(const PipelineContext& ctx, std::size_t workers, std::ostream* log)
{
    const auto& g = ctx.config.xi_grid;
    const auto xis = log_space(g.min, g.max, g.count);
    SweepResult out;
    out.tau1 = tau_one(ctx.field);
    if (log && !ctx.field.has_limit_at_zero())
        *log << "warning: coefficient has no limit at t = 0; mode solves start at t = "
             << format_double(ctx.config.solver.t_start) << "\n";
    std::vector<SweepRow> rows(xis.size());
    std::vector<std::string> errors(xis.size());
    parallel_for(xis.size(), workers, [&](std::size_t i) {
        try {
            rows[i] = solve_point(ctx, xis[i], out.tau1);
        } catch (const Error& e) {
            errors[i] = e.what();
            if (errors[i].empty()) errors[i] = "unknown failure";
        }
    });
    for (std::size_t i = 0; i < xis.size(); ++i) {
        if (!errors[i].empty()) {
            out.errors.push_back({xis[i], errors[i]});
            continue;
        }
        if (log && rows[i].eps_clamped)
            *log << "note: eps clamped to tau1 = " << format_double(out.tau1) << " at xi = " << format_double(xis[i]) << "\n";
        out.rows.push_back(rows[i]);
    }
    out.M_empirical = 0.0;
    for (auto& r : out.rows) {
        r.ratio = r.gronwall_total / ctx.model.shape(r.xi);
        out.M_empirical = std::max(out.M_empirical, r.ratio);
    }
    ExponentModel m = ctx.model;
    m.M = out.M_empirical;
    for (auto& r : out.rows) {
        r.exponent_model_value = theoretical_exponent(m, r.xi);
        r.flat_log_bound = energy_ratio_bound(m, ctx.field.lambda0, ctx.field.Lambda0, r.xi).log_value;
        r.flat_bound_pass = r.flat_log_ratio <= r.flat_log_bound;
    }
    return out;
}

ApproximationReport run_approximation(const PipelineContext& ctx, std::size_t workers)
{
    if (!ctx.field.certificate) throw ValidationError("field: no regularity certificate; add field.certificate");
    const auto& p = ctx.config.approximation;
    const double tau0 = std::min(ctx.field.certificate->tau0, ctx.field.certificate->mu.tau0);
    if (p.eps_max > tau0) throw ValidationError("approximation.eps_max: exceeds tau0 = " + format_double(tau0));
    const auto eps = log_space(p.eps_min, p.eps_max, p.eps_count);
    const auto ts = log_space(p.t_min, ctx.field.T, p.t_count);
    ApproximationOptions o;
    o.workers = workers;
    o.tol = ctx.config.quadrature.mollify_tol;
    return verify_approximation(ctx.field, ctx.kernel, eps, ts, o);
}

Table sweep_table(const SweepResult& s)
{
    Table t;
    t.columns = {"xi",        "eps",          "E0",         "ET",           "log_ratio",
                 "gronwall_total", "exponent_model_value", "ratio", "flat_log_ratio", "flat_log_bound",
                 "log_data",  "log_magnitude_T", "dominance_margin", "eps_clamped", "dominance_pass",
                 "flat_bound_pass"};
    for (const auto& r : s.rows)
        t.add({r.xi, r.eps, r.E0, r.ET, r.log_ratio, r.gronwall_total, r.exponent_model_value, r.ratio,
               r.flat_log_ratio, r.flat_log_bound, r.log_data, r.log_magnitude_T, r.dominance_margin, r.eps_clamped,
               r.dominance_pass, r.flat_bound_pass});
    return t;
}

Table approximation_table(const ApproximationReport& rep)
{
    Table t;
    t.columns = {"eps", "t", "lhs1", "rhs1", "lhs2", "rhs2", "pass1", "pass2"};
    for (const auto& r : rep.rows) t.add({r.eps, r.t, r.lhs1, r.rhs1, r.lhs2, r.rhs2, r.pass1, r.pass2});
    return t;
}

Table ratios_table(const GrowthFit& fit)
{
    Table t;
    t.columns = {"xi", "shape", "log_ratio", "ratio", "residual"};
    for (std::size_t i = 0; i < fit.xi.size(); ++i)
        t.add({fit.xi[i], fit.shape[i], fit.ratios[i] * fit.shape[i], fit.ratios[i], fit.residuals[i]});
    return t;
}

Table decay_table(const DecayProfile& d)
{
    Table t;
    if (d.kind == DecayOptions::Kind::Gevrey) {
        t.columns = {"xi", "log_magnitude", "log_fit"};
        for (const auto& s : d.samples)
            t.add({s.xi, s.log_magnitude, d.log_K - d.delta * std::pow(s.xi, 1.0 / d.sigma)});
        return t;
    }
    t.columns = {"zeta", "log_K_zeta", "K_zeta", "pass"};
    for (std::size_t i = 0; i < d.zetas.size(); ++i)
        t.add({d.zetas[i], d.log_K_zeta[i], d.K_zeta[i], static_cast<bool>(d.zeta_pass[i])});
    return t;
}

std::vector<GrowthSample> growth_samples(const SweepResult& s)
{
    std::vector<GrowthSample> out;
    for (const auto& r : s.rows) out.push_back({r.xi, r.log_ratio});
    return out;
}

std::vector<DecaySample> decay_samples(const SweepResult& s, double xi_threshold)
{
    std::vector<DecaySample> out;
    for (const auto& r : s.rows)
        if (r.xi >= xi_threshold) out.push_back({r.xi, r.log_magnitude_T});
    return out;
}

DecayOptions decay_options(const PipelineContext& ctx)
{
    DecayOptions o;
    o.kind = ctx.config.decay.kind;
    o.sigma = ctx.config.data.profile == DataConfig::Profile::Gevrey ? ctx.config.data.sigma : 1.0;
    o.zetas = ctx.config.decay.zetas;
    o.min_xi = ctx.config.decay.min_xi;
    o.xi_threshold = o.kind == DecayOptions::Kind::Gevrey ? 1.0 : 1.0 / tau_one(ctx.field);
    return o;
}

std::string validation_json(const PipelineContext& ctx)
{
    const auto& f = ctx.field;
    ojson j;
    j["name"] = ctx.config.name;
    j["n"] = f.n;
    j["T"] = f.T;
    j["lambda0"] = f.lambda0;
    j["Lambda0"] = f.Lambda0;
    j["sup_norm"] = f.sup_norm;
    j["has_limit_at_zero"] = f.has_limit_at_zero();
    j["oscillatory"] = f.oscillatory();
    j["tau1"] = tau_one(f);
    j["t_start"] = ctx.config.solver.t_start;
    j["kernel"] = ctx.kernel.profile() == MollifierKernel::Profile::Bump ? "bump"
                                                                        : "polynomial(" + std::to_string(ctx.kernel.degree()) + ")";
    j["model_threshold"] = ctx.model.xi_threshold();
    j["config"] = ojson::parse(serialize_config(ctx.config));
    return j.dump(2) + "\n";
}

std::string certificate_json(const PipelineContext& ctx)
{
    ojson j;
    if (!ctx.field.certificate) {
        j["certified"] = false;
        return j.dump(2) + "\n";
    }
    const auto& c = *ctx.field.certificate;
    j["certified"] = true;
    j["C"] = c.C;
    j["mu"] = modulus_json(c.mu);
    j["nu"] = {{"name", c.nu.name()}, {"kappa", c.nu.kappa}, {"kappa_analytic", analytic_kappa(c.nu)}};
    j["tau0"] = c.tau0;
    j["tau1"] = tau_one(ctx.field);
    j["xi_samples"] = c.xi_samples.size();
    j["lambda0"] = ctx.field.lambda0;
    j["Lambda0"] = ctx.field.Lambda0;
    try {
        const auto m = analytic_model(ctx.field, ctx.model.kind, ctx.kernel);
        j["analytic_M"] = finite_or_null(m.M);
        if (m.kind == ExponentModel::Kind::LogPsi) {
            j["analytic_M_prime"] = finite_or_null(m.M_prime);
            j["analytic_M_double_prime"] = finite_or_null(m.M_double_prime);
        }
    } catch (const Error& e) {
        j["analytic_M"] = nullptr;
        j["analytic_M_note"] = e.what();
    }
    return j.dump(2) + "\n";
}

std::string classification_json(const Classification& c, const GrowthFit& fit, const DecayProfile& decay)
{
    ojson j;
    j["status"] = "classified";
    j["model"] = c.kind == ExponentModel::Kind::Gevrey ? "gevrey" : "log_psi";
    j["verdict"] = c.verdict;
    j["fit"] = {{"consistent", fit.consistent},       {"M_slope", fit.slope},
                {"intercept", fit.intercept},         {"r_squared", fit.r_squared},
                {"M_sup", fit.sup_ratio},             {"head_sup_ratio", fit.head_sup_ratio},
                {"threshold", fit.threshold},         {"slack", fit.slack}};
    if (c.kind == ExponentModel::Kind::Gevrey) {
        j["p"] = c.p;
        j["alpha"] = c.alpha;
        j["sigma_star"] = c.sigma_star;
        j["sigma_star_fraction"] = c.sigma_star_fraction;
        j["data_sigma"] = c.data_sigma;
        j["decay_preserved"] = c.decay_preserved;
        j["limit_note"] = c.limit_note;
    } else {
        j["psi"] = c.psi;
        j["modulus"] = c.modulus_note;
        ojson th = ojson::array();
        for (std::size_t i = 0; i < c.zetas.size(); ++i) th.push_back({{"zeta", c.zetas[i]}, {"theta", c.thetas[i]}});
        j["theta"] = th;
    }
    ojson d;
    d["kind"] = decay.kind == DecayOptions::Kind::Gevrey ? "gevrey" : "polynomial";
    d["pass"] = decay.pass;
    if (decay.kind == DecayOptions::Kind::Gevrey) {
        d["sigma"] = decay.sigma;
        d["log_K"] = decay.log_K;
        d["delta"] = decay.delta;
        d["r_squared"] = decay.r_squared;
    }
    d["samples"] = decay.samples.size();
    j["decay"] = d;
    j["notes"] = c.notes;
    return j.dump(2) + "\n";
}

RunSummary run_experiment(const ExperimentConfig& config, Stage stage, const RunOptions& opt)
{
    const std::size_t workers = std::max<std::size_t>(1, opt.workers);
    const PipelineContext ctx = prepare(config);
    RunSummary sum;

    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + opt.out_dir + ": " + ec.message());
    const std::filesystem::path dir(opt.out_dir);
    auto out = [&](const std::string& name) { return (dir / name).string(); };
    auto emit_table = [&](const Table& t, const std::string& stem) {
        const std::string path = out(stem + extension(opt.format));
        emit(t, path, opt.format);
        sum.files.push_back(path);
    };
    auto emit_text = [&](const std::string& text, const std::string& name) {
        write_text(out(name), text);
        sum.files.push_back(out(name));
    };

    emit_text(validation_json(ctx), "validate.json");
    const bool all = stage == Stage::All;

    if (stage == Stage::Certify || all) {
        if (!ctx.field.certificate && !all) throw ValidationError("field: no regularity certificate; add field.certificate");
        emit_text(certificate_json(ctx), "certificate.json");
    }

    if (stage == Stage::MollifyVerify || (all && ctx.field.certificate)) {
        const auto rep = run_approximation(ctx, workers);
        emit_table(approximation_table(rep), "approximation");
        ojson j{{"C", rep.C},
                {"kappa", rep.kappa},
                {"kappa_hat", rep.kappa_hat},
                {"sup_norm", rep.sup_norm},
                {"drho_l1", rep.drho_l1},
                {"C_prime", rep.C_prime},
                {"C_double_prime", rep.C_double_prime},
                {"points", rep.rows.size()},
                {"failures", rep.failures},
                {"all_pass", rep.all_pass},
                {"worst_margin1", rep.worst_margin1},
                {"worst_margin2", rep.worst_margin2}};
        emit_text(j.dump(2) + "\n", "approximation_summary.json");
        sum.approximation_pass = rep.all_pass;
    } else if (all && opt.log) {
        *opt.log << "note: no certificate; mollifier bound check skipped\n";
    }

    if (stage == Stage::Sweep || stage == Stage::Classify || all) {
        const SweepResult sweep = run_sweep(ctx, workers, opt.log);
        sum.sweep_errors = sweep.errors.size();
        ojson manifest = ojson::array();
        for (const auto& e : sweep.errors) manifest.push_back({{"xi", e.xi}, {"stage", "sweep"}, {"message", e.message}});
        emit_text(manifest.dump(2) + "\n", "errors.json");
        if (sweep.rows.empty()) throw NumericalError("sweep: every grid point failed; see errors.json");
        emit_table(sweep_table(sweep), "sweep");

        if (stage == Stage::Classify || all) {
            const auto gs = growth_samples(sweep);
            GrowthFit fit;
            try {
                fit = fit_growth(gs, ctx.model, config.fit);
            } catch (const DomainError& e) {
                throw NumericalError(std::string("fit: ") + e.what());
            }
            emit_table(ratios_table(fit), "ratios");
            const DecayOptions dopt = decay_options(ctx);
            const DecayProfile decay = check_decay(decay_samples(sweep, dopt.xi_threshold), dopt);
            emit_table(decay_table(decay), "decay");
            if (!fit.consistent) {
                ojson j{{"status", "refused"},
                        {"reason", "growth fit is inconsistent with the model"},
                        {"model", ctx.model.kind == ExponentModel::Kind::Gevrey ? "gevrey" : "log_psi"},
                        {"M_slope", fit.slope},
                        {"M_sup", fit.sup_ratio},
                        {"threshold", fit.threshold}};
                emit_text(j.dump(2) + "\n", "classification.json");
                sum.refused = true;
            } else {
                emit_text(classification_json(classify(fit, ctx.model, decay), fit, decay), "classification.json");
            }
        }
    }
    return sum;
}

}  // namespace wellpose
