#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "wellpose/coefficients.hpp"
#include "wellpose/error.hpp"
#include "wellpose/grid.hpp"

using namespace wellpose;

namespace {

CoefficientField diag14()
{
    return CoefficientField::matrix(2,
                                    {ScalarFunction::constant(1.0), ScalarFunction::constant(0.0),
                                     ScalarFunction::constant(0.0), ScalarFunction::constant(4.0)},
                                    1.0);
}

}  // namespace

TEST_CASE("symbol examples")
{
    const auto c = CoefficientField::scalar(ScalarFunction::constant(2.5), 1.0);
    CHECK(symbol(c, 0.3, std::vector<double>{-7.0}) == 2.5);

    const auto id = CoefficientField::matrix(2,
                                             {ScalarFunction::constant(1.0), ScalarFunction::constant(0.0),
                                              ScalarFunction::constant(0.0), ScalarFunction::constant(1.0)},
                                             1.0);
    CHECK(symbol(id, 0.5, std::vector<double>{3.0, 4.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(symbol(diag14(), 0.5, std::vector<double>{1.0, 1.0}) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK_THROWS_AS(symbol(diag14(), 0.5, std::vector<double>{0.0, 0.0}), DomainError);
}

TEST_CASE("symbol is homogeneous of degree 0 and reduces to a11 for n = 1")
{
    const auto f = CoefficientField::matrix(2,
                                            {ScalarFunction::linear(2.0, 1.0), ScalarFunction::constant(0.3),
                                             ScalarFunction::constant(0.3), ScalarFunction::holder_singular(3.0, 0.5, 1.0)},
                                            1.0);
    const std::vector<double> xi{0.7, -1.3};
    for (double c : {-5.0, 1e-3, 2.0, 1e4}) {
        const std::vector<double> cx{c * xi[0], c * xi[1]};
        for (double t : {0.1, 0.5, 1.0}) CHECK(symbol(f, t, cx) == doctest::Approx(symbol(f, t, xi)).epsilon(1e-14));
    }
    const auto s = CoefficientField::scalar(ScalarFunction::holder_singular(2.0, 1.0, 3.0), 1.0);
    for (double t : {0.05, 0.3, 0.9})
        for (double x : {-3.0, 0.5, 1e5}) CHECK(symbol(s, t, std::vector<double>{x}) == s.entries[0](t));
}

TEST_CASE("check_hyperbolicity")
{
    const auto one = CoefficientField::scalar(ScalarFunction::constant(1.0), 1.0);
    auto rep = check_hyperbolicity(one, lin_space(0.0, 1.0, 10), {{1.0}});
    CHECK(rep.pass);
    CHECK(rep.lambda_hat == 1.0);
    CHECK(rep.Lambda_hat == 1.0);

    // 2 + sin(1/t): dense-grid oracle for the extremes
    const auto s = CoefficientField::scalar(ScalarFunction::holder_singular(2.0, 1.0, 1.0), 1.0);
    const auto ts = log_space(1e-4, 1.0, 20000);
    rep = check_hyperbolicity(s, ts, {{1.0}});
    double lo = 10.0, hi = -10.0;
    for (double t : ts) {
        lo = std::min(lo, 2.0 + std::sin(1.0 / t));
        hi = std::max(hi, 2.0 + std::sin(1.0 / t));
    }
    CHECK(rep.lambda_hat == doctest::Approx(lo).epsilon(1e-14));
    CHECK(rep.Lambda_hat == doctest::Approx(hi).epsilon(1e-14));
    CHECK(rep.lambda_hat == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(rep.Lambda_hat == doctest::Approx(3.0).epsilon(1e-4));

    rep = check_hyperbolicity(diag14(), lin_space(0.0, 1.0, 5), sphere_samples(2));
    CHECK(rep.lambda_hat == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.Lambda_hat == doctest::Approx(4.0).epsilon(1e-14));

    CoefficientField neg;
    neg.entries = {ScalarFunction::linear(1.0, -2.0)};
    rep = check_hyperbolicity(neg, lin_space(0.0, 1.0, 11), {{1.0}});
    CHECK_FALSE(rep.pass);
    CHECK(rep.lambda_hat == doctest::Approx(-1.0));
    CHECK(rep.t_at_min == 1.0);
    CHECK_THROWS_AS(CoefficientField::scalar(ScalarFunction::linear(1.0, -2.0), 1.0), ValidationError);
}

TEST_CASE("non-symmetric matrices are rejected")
{
    CHECK_THROWS_AS(CoefficientField::matrix(2,
                                             {ScalarFunction::constant(1.0), ScalarFunction::constant(0.1),
                                              ScalarFunction::constant(0.2), ScalarFunction::constant(1.0)},
                                             1.0),
                    ValidationError);
}

TEST_CASE("estimate_regularity_constant")
{
    const auto c = CoefficientField::scalar(ScalarFunction::constant(3.0), 1.0);
    const auto mu = ModulusSpec::holder(0.5);
    const auto nu = BlowupSpec::power(2.0);
    CHECK(estimate_regularity_constant(c, mu, nu, log_space(1e-4, 1.0, 64), log_space(1e-8, 1.0, 64), {{1.0}}).C_hat ==
          0.0);

    // 2 + sin(t^-3) against Holder(1/2), Power(2): stable under refinement
    const auto f = CoefficientField::scalar(ScalarFunction::holder_singular(2.0, 1.0, 3.0), 1.0);
    const double c1 =
        estimate_regularity_constant(f, mu, nu, log_space(1e-4, 1.0, 512), log_space(1e-10, 1.0, 512), {{1.0}}).C_hat;
    const double c2 =
        estimate_regularity_constant(f, mu, nu, log_space(1e-4, 1.0, 1024), log_space(1e-10, 1.0, 1024), {{1.0}}).C_hat;
    CHECK(std::isfinite(c1));
    CHECK(std::abs(c2 - c1) < 0.05 * c1);

    // blow-up rate t^1.5 is too weak: the sup behaves like t_min^(-1/2) once tau reaches t_min^4
    const auto weak = BlowupSpec::power(1.5);
    double previous = 0.0;
    for (double tmin : {1e-2, 1e-3, 1e-4}) {
        const auto taus = log_space(1e-2 * std::pow(tmin, 4.0), 1.0, 512);
        const double ch = estimate_regularity_constant(f, mu, weak, log_space(tmin, 1.0, 512), taus, {{1.0}}).C_hat;
        if (previous > 0.0) CHECK(ch / previous >= std::pow(10.0, 0.25));
        previous = ch;
    }
}

TEST_CASE("make_test_coefficient")
{
    TestFamilyParams p;
    const auto c = make_test_coefficient(TestFamily::Constant, p);
    CHECK(c.lambda0 == 1.0);
    CHECK(c.Lambda0 == 1.0);
    REQUIRE(c.certificate);
    CHECK(c.certificate->C == 0.0);

    const auto h = make_test_coefficient(TestFamily::HolderSingular, p);
    CHECK(h.entries[0].q() == doctest::Approx(3.0).epsilon(1e-15));
    for (double t : {0.05, 0.5, 1.0}) CHECK(h.entries[0](t) == doctest::Approx(oracle::holder_a(t)).epsilon(1e-14));
    CHECK(h.lambda0 == 1.0);
    CHECK(h.Lambda0 == 3.0);
    REQUIRE(h.certificate);
    CHECK(h.certificate->C > 0.0);
    CHECK(std::isfinite(h.certificate->C));

    const auto s = make_test_coefficient(TestFamily::PsiSingular, p);
    const auto& a = s.entries[0];
    CHECK(a.phase(1.0) == doctest::Approx(0.0));
    for (double t : {1e-6, 1e-3, 0.1, 0.5, 0.99}) {
        CHECK(a(t) == doctest::Approx(oracle::onepluslog_a(t)).epsilon(1e-12));
        const double nu = eval_nu(BlowupSpec::psi_derived(PsiSpec::one_plus_log()), t);
        CHECK(a.phase_rate(t) == doctest::Approx(1.0 / nu).epsilon(1e-12));
    }
    REQUIRE(s.certificate);
    CHECK(s.certificate->C > 0.0);

    TestFamilyParams bad;
    bad.mean = 0.5;
    CHECK_THROWS_AS(make_test_coefficient(TestFamily::HolderSingular, bad), ValidationError);
    bad = TestFamilyParams{};
    bad.p = 0.4;
    CHECK_THROWS_AS(make_test_coefficient(TestFamily::HolderSingular, bad), ValidationError);
}

TEST_CASE("generated families are hyperbolic with refinement-stable certificates")
{
    for (auto kind : {TestFamily::HolderSingular, TestFamily::PsiSingular}) {
        CAPTURE(to_string(kind));
        TestFamilyParams p;
        const auto f = make_test_coefficient(kind, p);
        CHECK(check_hyperbolicity(f, log_space(1e-6, 1.0, 4096), {{1.0}}).pass);
        p.cert_points *= 2;
        const auto g = make_test_coefficient(kind, p);
        CHECK(std::abs(g.certificate->C - f.certificate->C) < 0.05 * f.certificate->C);
    }
}

TEST_CASE("certificates are monotone in the blow-up power")
{
    const auto f = CoefficientField::scalar(ScalarFunction::holder_singular(2.0, 1.0, 3.0), 1.0);
    const auto mu = ModulusSpec::holder(0.5);
    const auto c2 = certify(f, mu, BlowupSpec::power(2.0));
    for (double p2 : {2.5, 3.0}) {
        const auto c3 = certify(f, mu, BlowupSpec::power(p2));
        CHECK(c3.C <= c2.C * std::max(1.0, std::pow(f.T, p2 - 2.0)) * (1.0 + 1e-12));
    }
}

TEST_CASE("tabulated coefficients load from a two-column file")
{
    const auto path = std::filesystem::temp_directory_path() / "wellpose_table_test.txt";
    {
        std::ofstream out(path);
        out << "# t value\n0 1\n0.5 2\n1 1.5\n";
    }
    const auto f = load_table(path.string());
    std::filesystem::remove(path);
    CHECK(f.kind() == ScalarFunction::Kind::Tabulated);
    CHECK(f(0.0) == 1.0);
    CHECK(f(0.5) == 2.0);
    CHECK(f(1.0) == 1.5);
    const auto [lo, hi] = f.range(0.0, 1.0);
    CHECK(lo == 1.0);
    CHECK(hi == 2.0);
    CHECK_THROWS_AS(load_table("/nonexistent/wellpose.txt"), IoError);
}

TEST_CASE("fields without a limit at 0 refuse evaluation there")
{
    const auto h = ScalarFunction::holder_singular(2.0, 1.0, 3.0);
    CHECK_FALSE(h.has_limit_at_zero());
    CHECK_THROWS_AS(h(0.0), DomainError);
    CHECK(ScalarFunction::linear(1.0, 1.0).has_limit_at_zero());
    CHECK(ScalarFunction::psi_singular(2.0, 1.0, 1.0, PsiSpec::one_minus_exp(0.5), 1.0).has_limit_at_zero());
}
