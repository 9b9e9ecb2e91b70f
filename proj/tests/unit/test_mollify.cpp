#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "wellpose/coefficients.hpp"
#include "wellpose/error.hpp"
#include "wellpose/grid.hpp"
#include "wellpose/mollify.hpp"

using namespace wellpose;

namespace {

CoefficientField holder_field()
{
    return make_test_coefficient(TestFamily::HolderSingular, {});
}

CoefficientField psi_field()
{
    return make_test_coefficient(TestFamily::PsiSingular, {});
}

}  // namespace

TEST_CASE("bump kernel is normalized, even and supported in [-1, 1]")
{
    const auto k = MollifierKernel::bump();
    const double mass = oracle::simpson([&](double s) { return k.rho(s); }, -1.0, 1.0, 200'000);
    CHECK(std::abs(mass - 1.0) < 1e-10);
    CHECK(std::abs(k.cdf(1.0) - 1.0) < 1e-10);
    CHECK(k.cdf(-1.0) == 0.0);
    CHECK(k.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    for (double s : {0.1, 0.5, 0.9, 0.999}) {
        CHECK(k.rho(s) == k.rho(-s));
        CHECK(k.drho(s) == -k.drho(-s));
        CHECK(k.rho(s) == doctest::Approx(oracle::bump_raw(s) / oracle::bump_mass()).epsilon(1e-12));
    }
    CHECK(k.rho(1.0) == 0.0);
    CHECK(k.rho(-1.5) == 0.0);
    CHECK(k.drho(1.2) == 0.0);

    const double l1 = oracle::simpson([](double s) { return std::abs(oracle::bump_raw_derivative(s)); }, -1.0, 1.0,
                                      1'000'000) / oracle::bump_mass();
    CHECK(std::abs(k.drho_l1() - l1) < 1e-8);
}

TEST_CASE("polynomial kernels")
{
    for (int deg : {2, 3, 5}) {
        CAPTURE(deg);
        const auto k = MollifierKernel::polynomial(deg);
        const double mass = oracle::simpson([&](double s) { return k.rho(s); }, -1.0, 1.0, 20'000);
        CHECK(std::abs(mass - 1.0) < 1e-10);
        const double l1 = oracle::simpson([&](double s) { return std::abs(k.drho(s)); }, -1.0, 1.0, 200'000);
        CHECK(k.drho_l1() == doctest::Approx(l1).epsilon(1e-8));
        // closed form: ||rho'||_1 = 2 rho(0)
        CHECK(k.drho_l1() == doctest::Approx(2.0 * k.rho(0.0)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(MollifierKernel::polynomial(0), ValidationError);
}

TEST_CASE("clamped extension")
{
    const auto f = ScalarFunction::linear(1.0, 1.0);
    CHECK(extend(f, 1.0, 0.1, 0.05) == doctest::Approx(1.1));
    CHECK(extend(f, 1.0, 0.1, -3.0) == doctest::Approx(1.1));
    CHECK(extend(f, 1.0, 0.1, 0.5) == doctest::Approx(1.5));
    CHECK(extend(f, 1.0, 0.1, 1.7) == doctest::Approx(2.0));
    const auto field = CoefficientField::scalar(f, 1.0);
    CHECK(extend(field, 0.1, 1.7) == doctest::Approx(2.0));
}

TEST_CASE("constants are reproduced exactly, linear functions away from the clamps")
{
    const auto c = CoefficientField::scalar(ScalarFunction::constant(3.0), 1.0);
    for (double eps : {0.3, 1e-2, 1e-5}) {
        const MollifiedCoefficient mc(c, eps);
        for (double t : {0.0, 0.2, 0.5, 1.0, 1.3}) {
            CHECK(mollify_value(mc, t) == doctest::Approx(3.0).epsilon(1e-13));
            CHECK(std::abs(mollify_derivative(mc, t)) < 1e-10 / eps);
        }
    }
    const auto l = CoefficientField::scalar(ScalarFunction::linear(1.0, 2.0), 1.0);
    const MollifiedCoefficient ml(l, 0.05);
    for (double t : {0.1, 0.4, 0.9}) {
        CHECK(mollify_value(ml, t) == doctest::Approx(1.0 + 2.0 * t).epsilon(1e-11));
        CHECK(mollify_derivative(ml, t) == doctest::Approx(2.0).epsilon(1e-9));
    }
}

TEST_CASE("oscillating coefficient matches brute-force quadrature")
{
    const auto f = holder_field();
    const MollifiedCoefficient mc(f, 1e-2);
    for (double t : {0.5, 0.75, 0.995}) {
        CAPTURE(t);
        CHECK(std::abs(mollify_value(mc, t) - oracle::mollified(oracle::holder_a, 1e-2, 1.0, t)) < 1e-8);
        const double d = oracle::mollified_derivative(oracle::holder_a, 1e-2, 1.0, t);
        CHECK(std::abs(mollify_derivative(mc, t) - d) < 1e-8 * std::max(1.0, std::abs(d)));
    }

    const auto g = psi_field();
    const MollifiedCoefficient mg(g, 1e-3);
    for (double t : {2e-3, 0.01, 0.3, 0.9995}) {
        CAPTURE(t);
        CHECK(std::abs(mollify_value(mg, t) - oracle::mollified(oracle::onepluslog_a, 1e-3, 1.0, t)) < 1e-8);
    }
}

TEST_CASE("derivative agrees with centered differences")
{
    for (const auto& f : {holder_field(), psi_field()}) {
        const MollifiedCoefficient mc(f, 1e-2);
        for (double t : {0.3, 0.6, 0.9}) {
            const double h = 1e-6;
            const double fd = (mollify_value(mc, t + h) - mollify_value(mc, t - h)) / (2.0 * h);
            const double d = mollify_derivative(mc, t);
            CHECK(std::abs(d - fd) <= 1e-4 * std::max(1.0, std::abs(d)));
        }
    }
}

TEST_CASE("singular family at t = 0.5, eps = 1e-2: derivative matches a 1e-6 centered difference")
{
    const MollifiedCoefficient mc(holder_field(), 1e-2);
    const double h = 1e-6;
    const double fd = (mollify_value(mc, 0.5 + h) - mollify_value(mc, 0.5 - h)) / (2.0 * h);
    CHECK(std::abs(mollify_derivative(mc, 0.5) - fd) <= 1e-4 * std::abs(fd));
}

TEST_CASE("mollified values stay inside the hyperbolicity bounds")
{
    for (const auto& f : {holder_field(), psi_field()}) {
        for (double eps : {1e-1, 1e-3, 1e-5}) {
            const MollifiedCoefficient mc(f, eps);
            for (double t : log_space(1e-6, 1.0, 97)) {
                const double v = mollify_value(mc, t);
                CHECK(v >= f.lambda0 - 1e-12);
                CHECK(v <= f.Lambda0 + 1e-12);
            }
        }
    }
}

TEST_CASE("approximation error shrinks with eps where the coefficient is smooth")
{
    auto sup_error = [](const CoefficientField& f, double eps, double lo, double hi) {
        const MollifiedCoefficient mc(f, eps);
        double worst = 0.0;
        for (double t : lin_space(lo, hi, 41)) worst = std::max(worst, std::abs(mollify_value(mc, t) - mc.extended(t, std::vector<double>{1.0})));
        return worst;
    };
    const auto h = holder_field();
    const auto g = psi_field();
    double ph = kInf, pg = kInf;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        const double eh = sup_error(h, eps, 0.5, 0.9);
        const double eg = sup_error(g, eps, 0.05, 0.9);
        CHECK(eh <= ph);
        CHECK(eg <= pg);
        ph = eh;
        pg = eg;
    }
    CHECK(ph < 1e-3);
    CHECK(pg < 1e-3);
}

TEST_CASE("derivative L1 norm of the scaled kernel is ||rho'|| / eps")
{
    const auto k = MollifierKernel::bump();
    for (double eps : {1e-1, 1e-3}) {
        const double l1 = oracle::simpson([&](double s) { return std::abs(k.drho(s / eps)) / (eps * eps); }, -eps, eps,
                                          400'000);
        CHECK(l1 == doctest::Approx(k.drho_l1() / eps).epsilon(1e-8));
    }
}

TEST_CASE("approximation bounds hold for the certified families")
{
    const auto c = make_test_coefficient(TestFamily::Constant, {});
    const auto rc = verify_approximation(c, MollifierKernel::bump(), log_space(1e-3, 1e-1, 5), log_space(1e-5, 1.0, 9));
    CHECK(rc.all_pass);
    CHECK(rc.rows.size() == 45);

    const auto h = holder_field();
    const std::vector<double> eps{1e-1, 1e-2, 1e-3};
    const auto ts = log_space(1e-5, 1.0, 32);
    const auto rh = verify_approximation(h, MollifierKernel::bump(), eps, ts);
    CHECK(rh.all_pass);
    CHECK(rh.failures == 0);
    CHECK(rh.C_prime >= 2.0 * h.sup_norm);
    CHECK(rh.kappa == doctest::Approx(0.25));
    for (const auto& r : rh.rows) {
        CHECK(r.rhs1 > 0.0);
        CHECK(r.rhs2 > 0.0);
    }

    const auto rg = verify_approximation(psi_field(), MollifierKernel::bump(), std::vector<double>{1e-1, 1e-3}, ts);
    CHECK(rg.all_pass);
}

TEST_CASE("the bound checker detects an inflated left side")
{
    const auto h = holder_field();
    const std::vector<double> eps{1e-1, 1e-2, 1e-3};
    const auto ts = log_space(1e-5, 1.0, 32);
    ApproximationOptions opt;
    const auto base = verify_approximation(h, MollifierKernel::bump(), eps, ts, opt);
    double tightest = 0.0;
    for (const auto& r : base.rows) tightest = std::max({tightest, r.lhs1 / r.rhs1, r.lhs2 / r.rhs2});
    REQUIRE(tightest > 0.0);
    opt.lhs_scale = 1.01 / tightest;
    const auto bad = verify_approximation(h, MollifierKernel::bump(), eps, ts, opt);
    CHECK_FALSE(bad.all_pass);
    CHECK(bad.failures >= 1);
}

TEST_CASE("the bound checker rejects bad grids and uncertified fields")
{
    const auto h = holder_field();
    CHECK_THROWS_AS(verify_approximation(h, MollifierKernel::bump(), std::vector<double>{2.0}, std::vector<double>{0.5}),
                    DomainError);
    CHECK_THROWS_AS(verify_approximation(h, MollifierKernel::bump(), std::vector<double>{0.1}, std::vector<double>{0.0}),
                    DomainError);
    const auto plain = CoefficientField::scalar(ScalarFunction::constant(1.0), 1.0);
    CHECK_THROWS_AS(verify_approximation(plain, MollifierKernel::bump(), std::vector<double>{0.1}, std::vector<double>{0.5}),
                    ValidationError);
}
