// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "wellpose/analysis.hpp"
#include "wellpose/cli.hpp"
#include "wellpose/coefficients.hpp"
#include "wellpose/config.hpp"
#include "wellpose/energy.hpp"
#include "wellpose/experiment.hpp"
#include "wellpose/grid.hpp"
#include "wellpose/moduli.hpp"
#include "wellpose/mollify.hpp"

using namespace wellpose;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = WELLPOSE_CONFIG_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s  %d  %-28s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args)
{
    char buf[1024];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::size_t workers()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Per-xi Gronwall ratios from t = 0 with eps = min(1/xi, tau1).
std::vector<double> gronwall_ratios(const PipelineContext& ctx, const std::vector<double>& xs,
                                    const std::function<double(double)>& shape)
{
    const double tau1 = tau_one(ctx.field);
    std::vector<double> out;
    for (double x : xs) {
        GronwallOptions o;
        o.tol = ctx.config.quadrature.tol;
        const auto g = gronwall_bound(ctx.field, std::vector<double>{x}, std::min(1.0 / x, tau1), o, ctx.kernel);
        out.push_back(g.total / shape(x));
    }
    return out;
}

Outcome exponent_law(const std::string& config, const std::function<double(double)>& shape, bool gevrey)
{
    const auto ctx = prepare(load_config(kConfigs + "/" + config));
    // 16 points on [10, 1e4], then one more decade at the same spacing
    const auto base = log_space(10.0, 1e4, 16);
    const double step = std::log(base[1] / base[0]);
    std::vector<double> extra;
    for (int i = 1; i <= 5; ++i) extra.push_back(1e4 * std::exp(step * i));
    const auto r = gronwall_ratios(ctx, base, shape);
    const auto re = gronwall_ratios(ctx, extra, shape);
    const double mx = *std::max_element(r.begin(), r.end());
    const double med = median(r);
    const double mx_ext = std::max(mx, *std::max_element(re.begin(), re.end()));
    const bool spread = mx / med < 3.0;
    const bool stable = mx_ext <= 1.1 * mx;
    bool sigma_ok = true;
    std::string extra_note;
    if (gevrey) {
        sigma_ok = ctx.model.sigma_star() == 4.0 / 3.0 && small_fraction(ctx.model.sigma_star()) == "4/3";
        extra_note = fmt(", sigma* = %s", small_fraction(ctx.model.sigma_star()).c_str());
    }
    return {spread && stable && sigma_ok,
            fmt("max/median = %.4f (< 3), max %.5f -> %.5f over [10, 1e5] (+%.2f%%, <= 10%%)%s", mx / med, mx, mx_ext,
                100.0 * (mx_ext / mx - 1.0), extra_note.c_str())};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

int main()
{
    std::printf("acceptance suite (%zu hardware threads)\n", workers());

    report(1, "mollifier certification", [] {
        const auto f = make_test_coefficient(TestFamily::HolderSingular, {});
        ApproximationOptions o;
        o.workers = 1;
        const auto t0 = std::chrono::steady_clock::now();
        const auto rep = verify_approximation(f, MollifierKernel::bump(), log_space(1e-3, 1e-1, 64), log_space(1e-5, 1.0, 64), o);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double rate = 100.0 * static_cast<double>(rep.rows.size() - rep.failures) / rep.rows.size();
        return Outcome{rep.all_pass && rep.rows.size() == 4096 && secs < 120.0,
                       fmt("%.1f%% of 64x64 pass, C = %.4g, C' = %.4g, C'' = %.4g, single worker %.2f s (< 120 s)", rate,
                           rep.C, rep.C_prime, rep.C_double_prime, secs)};
    });

    report(2, "energy conservation", [] {
        const auto f = CoefficientField::scalar(ScalarFunction::constant(1.0), 1.0);
        double worst = 0.0;
        for (double x : {1.0, 10.0, 100.0, 1000.0}) {
            auto tr = integrate_mode(f, std::vector<double>{x}, 1.0, 0.0, 1.0);
            attach_energy(tr, MollifiedCoefficient(f, std::min(1.0 / x, tau_one(f))));
            worst = std::max(worst, std::abs(tr.energy.back() / tr.energy.front() - 1.0));
        }
        return Outcome{worst < 1e-8, fmt("max |E(T)/E(0) - 1| = %.3g (< 1e-8)", worst)};
    });

    report(3, "gronwall dominance", [] {
        struct Case {
            TestFamily family;
            double t_start;
        };
        double worst = kInf;
        std::size_t samples = 0, bad = 0;
        for (const auto& c : {Case{TestFamily::HolderSingular, 0.02}, Case{TestFamily::PsiSingular, 1e-6}}) {
            const auto f = make_test_coefficient(c.family, {});
            for (double x : {10.0, 100.0, 1000.0}) {
                ModeOptions mo;
                mo.t_start = c.t_start;
                auto tr = integrate_mode(f, std::vector<double>{x}, 1.0, 0.0, 1.0, mo);
                const MollifiedCoefficient mc(f, 1.0 / x);
                attach_energy(tr, mc);
                GronwallOptions go;
                go.t_start = c.t_start;
                go.tol = 1e-9;
                attach_gronwall(tr, mc, go);
                for (std::size_t i = 0; i < tr.size(); ++i) {
                    const double margin =
                        std::log(tr.energy.front()) + tr.gronwall[i] + std::log1p(1e-5) - std::log(tr.energy[i]);
                    worst = std::min(worst, margin);
                    ++samples;
                    if (margin < 0.0) ++bad;
                }
            }
        }
        return Outcome{bad == 0, fmt("%zu/%zu samples dominated, min log margin %.3g (E from t_start 0.02 / 1e-6)",
                                     samples - bad, samples, worst)};
    });

    report(4, "gevrey exponent law", [] {
        return exponent_law("gevrey_a05_p2.json", [](double x) { return 1.0 + std::pow(x, 0.75); }, true);
    });

    report(5, "C-infinity exponent law", [] {
        return exponent_law("cinf_onepluslog.json", [](double x) { return 1.0 + std::log(x); }, false);
    });

    report(6, "decay preservation", [] {
        const auto ctx = prepare(load_config(kConfigs + "/gevrey_a05_p2.json"));
        const auto sweep = run_sweep(ctx, workers());
        if (!sweep.errors.empty()) return Outcome{false, fmt("%zu sweep points failed", sweep.errors.size())};
        const auto opt = decay_options(ctx);
        const auto d = check_decay(decay_samples(sweep, opt.xi_threshold), opt);
        const auto fit = fit_growth(growth_samples(sweep), ctx.model, ctx.config.fit);
        const auto c = classify(fit, ctx.model, d);
        return Outcome{d.delta > 0.0 && d.r_squared > 0.99,
                       fmt("sigma = 1.2: delta' = %.5f (> 0), K' = %.4g, R^2 = %.6f (> 0.99) on %zu points; report: %s",
                           d.delta, d.K, d.r_squared, d.samples.size(), c.verdict.c_str())};
    });

    report(7, "oracle equivalence", [] {
        std::mt19937_64 rng(20261016);
        std::uniform_real_distribution<double> le(std::log(1e-3), std::log(1e-1)), lt(std::log(1e-5), 0.0);
        const auto hf = make_test_coefficient(TestFamily::HolderSingular, {});
        const auto pf = make_test_coefficient(TestFamily::PsiSingular, {});
        auto draw = [&](double& eps, double& t) {
            eps = std::exp(le(rng));
            t = std::exp(lt(rng));
        };

        // mollify_value against composite Simpson with 1e6 nodes
        constexpr std::size_t kNodes = 1'000'000;
        double worst_value = 0.0;
        std::size_t value_bad = 0, value_redrawn = 0;
        for (int i = 0; i < 100; ++i) {
            const bool holder = i % 2 == 0;
            double eps = 0.0, t = 0.0;
            for (;;) {
                draw(eps, t);
                if (!holder) break;
                // Simpson needs the phase of sin(u^-3) resolved at its step 2 eps / n
                const double lo = std::max(t - eps, eps);
                if (3.0 * std::pow(lo, -4.0) * 2.0 * eps / kNodes <= 0.005) break;
                ++value_redrawn;
            }
            const MollifiedCoefficient mc(holder ? hf : pf, eps);
            const double ref = holder ? oracle::mollified(oracle::holder_a, eps, 1.0, t, kNodes)
                                      : oracle::mollified(oracle::onepluslog_a, eps, 1.0, t, kNodes);
            const double err = std::abs(mollify_value(mc, t) - ref);
            worst_value = std::max(worst_value, err);
            if (!(err <= 1e-8)) ++value_bad;
        }

        // mollify_derivative against a five-point centered difference of mollify_value. The step is halved
        // from eps / 100 until two successive differences agree to 1e-6 and the round-off term
        // (1.5 * 1e-15 |a| / h) is below 1e-6 of the difference; points where that never happens
        // (derivative under the resolution of a double-precision difference quotient) are redrawn.
        double worst_rel = 0.0;
        std::size_t deriv_bad = 0, deriv_redrawn = 0;
        for (int i = 0; i < 100; ++i) {
            const bool holder = i % 2 == 0;
            for (;;) {
                double eps = 0.0, t = 0.0;
                draw(eps, t);
                const MollifiedCoefficient mc(holder ? hf : pf, eps);
                auto fd = [&](double h) {
                    return (mollify_value(mc, t - 2 * h) - 8 * mollify_value(mc, t - h) + 8 * mollify_value(mc, t + h) -
                            mollify_value(mc, t + 2 * h)) / (12.0 * h);
                };
                double h = eps / 100.0, prev = fd(h), ref = kInf;
                for (; h > eps * 1e-6; h /= 2) {
                    const double next = fd(h / 2);
                    const double roundoff = 1.5e-15 * std::abs(mollify_value(mc, t)) / (h / 2);
                    if (next != 0.0 && std::abs(next - prev) <= 1e-6 * std::abs(next) &&
                        roundoff <= 1e-6 * std::abs(next)) {
                        ref = next;
                        break;
                    }
                    prev = next;
                }
                if (!std::isfinite(ref)) {
                    ++deriv_redrawn;
                    continue;
                }
                const double rel = std::abs(mollify_derivative(mc, t) - ref) / std::abs(ref);
                worst_rel = std::max(worst_rel, rel);
                if (!(rel <= 1e-4)) ++deriv_bad;
                break;
            }
        }
        return Outcome{value_bad == 0 && deriv_bad == 0,
                       fmt("value: max |err| = %.3g (< 1e-8), %zu/100 fail, %zu sin(t^-3) draws outside Simpson "
                           "resolution redrawn; derivative: max rel = %.3g (< 1e-4), %zu/100 fail, %zu draws below "
                           "the difference-quotient floor redrawn",
                           worst_value, value_bad, value_redrawn, worst_rel, deriv_bad, deriv_redrawn)};
    });

    report(8, "closed-form moduli", [] {
        const double e = std::exp(1.0);
        const auto mu = ModulusSpec::psi_derived(PsiSpec::identity());
        const auto nu = BlowupSpec::psi_derived(PsiSpec::identity());
        const auto nl = BlowupSpec::psi_derived(PsiSpec::one_plus_log());
        double w_mu = 0.0, w_nu = 0.0, w_log = 0.0;
        for (double s : log_space(1e-12, mu.tau0, 1000)) w_mu = std::max(w_mu, std::abs(eval_modulus(mu, s) - s));
        for (double t : log_space(1e-12, 1.0 / e, 1000)) {
            w_nu = std::max(w_nu, std::abs(eval_nu(nu, t) - t));
            w_log = std::max(w_log, std::abs(eval_nu(nl, t) - t * std::abs(std::log(t))));
        }
        return Outcome{w_mu <= 1e-12 && w_nu <= 1e-12 && w_log <= 1e-12,
                       fmt("identity: max|mu - tau| = %.3g, max|nu - t| = %.3g; one_plus_log: max|nu - t|log t|| = %.3g "
                           "(<= 1e-12)",
                           w_mu, w_nu, w_log)};
    });

    report(9, "determinism", [] {
        const auto base = fs::temp_directory_path() / "wellpose_acceptance";
        fs::remove_all(base);
        std::ostringstream sink;
        for (const char* run : {"a", "b"}) {
            const int code =
                run_cli({"all", kConfigs + "/cinf_onepluslog.json", "--out", (base / run).string()}, sink, sink);
            if (code != kExitOk) return Outcome{false, fmt("run %s exited with %d", run, code)};
        }
        std::size_t files = 0, same = 0;
        for (const auto& entry : fs::directory_iterator(base / "a")) {
            if (entry.path().extension() != ".csv") continue;
            ++files;
            if (slurp(entry.path()) == slurp(base / "b" / entry.path().filename())) ++same;
        }
        fs::remove_all(base);
        return Outcome{files > 0 && same == files,
                       fmt("%zu/%zu CSV files byte-identical across two `all` runs", same, files)};
    });

    std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
