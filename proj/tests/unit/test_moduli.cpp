#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "wellpose/error.hpp"
#include "wellpose/grid.hpp"
#include "wellpose/moduli.hpp"

using namespace wellpose;

namespace {

const double kE = std::numbers::e;

std::vector<PsiSpec> all_psi()
{
    return {PsiSpec::identity(), PsiSpec::one_minus_exp(0.5), PsiSpec::one_minus_exp(1.0), PsiSpec::one_plus_log(),
            PsiSpec::power_beta(0.5), PsiSpec::power_beta(1.0)};
}

}  // namespace

TEST_CASE("eval_modulus closed forms")
{
    CHECK(eval_modulus(ModulusSpec::holder(0.5), 0.25) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(eval_modulus(ModulusSpec::psi_derived(PsiSpec::identity()), 0.1) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(eval_modulus(ModulusSpec::holder(0.5), 0.0) == 0.0);
    for (const auto& psi : all_psi()) CHECK(eval_modulus(ModulusSpec::psi_derived(psi), 0.0) == 0.0);
    CHECK(eval_modulus(ModulusSpec::custom({0.5, 1.0}, {0.5, 0.75}), 0.0) == 0.0);
}

TEST_CASE("eval_modulus rejects tau outside [0, tau0]")
{
    const auto mu = ModulusSpec::holder(0.5, 0.5);
    CHECK_THROWS_AS(eval_modulus(mu, 0.6), DomainError);
    CHECK_THROWS_AS(eval_modulus(mu, -1e-3), DomainError);
}

TEST_CASE("Lipschitz limit of the Holder family is exact")
{
    const auto mu = ModulusSpec::holder(1.0);
    for (double tau : log_space(1e-12, 1.0, 50)) CHECK(eval_modulus(mu, tau) == tau);
}

TEST_CASE("eval_nu closed forms")
{
    CHECK(eval_nu(BlowupSpec::power(2.0), 0.1) == doctest::Approx(0.01).epsilon(1e-14));
    const double t = std::exp(-2.0);
    CHECK(eval_nu(BlowupSpec::psi_derived(PsiSpec::one_plus_log()), t) == doctest::Approx(2.0 * t).epsilon(1e-13));
    CHECK(eval_nu(BlowupSpec::psi_derived(PsiSpec::identity()), 0.05) == doctest::Approx(0.05).epsilon(1e-14));
    CHECK_THROWS_AS(eval_nu(BlowupSpec::power(1.0), 0.0), DomainError);
    CHECK_THROWS_AS(eval_nu(BlowupSpec::constant(), -1.0), DomainError);
}

TEST_CASE("psi-derived blow-up rate is constant past 1/e and continuous at the splice")
{
    for (const auto& psi : all_psi()) {
        const auto nu = BlowupSpec::psi_derived(psi);
        const double left = eval_nu(nu, std::nextafter(1.0 / kE, 0.0));
        const double right = eval_nu(nu, 1.0 / kE);
        CHECK(std::abs(left - right) <= 1e-12 * right);
        CHECK(eval_nu(nu, 0.9) == doctest::Approx(right).epsilon(1e-15));
    }
}

TEST_CASE("estimate_doubling")
{
    const auto grid = log_space(1e-8, 1.0, 200);
    for (double p : {0.5, 1.0, 2.0, 3.5})
        CHECK(estimate_doubling(BlowupSpec::power(p), grid) == doctest::Approx(std::pow(2.0, -p)).epsilon(1e-12));
    for (const auto& psi : all_psi()) {
        CHECK(estimate_doubling(BlowupSpec::psi_derived(psi), grid) >= 0.5 - 1e-12);
        CHECK(analytic_kappa(BlowupSpec::psi_derived(psi)) == 0.5);
    }

    // exp(-1/t) violates the doubling condition: kappa-hat collapses as the grid reaches 0
    auto nu = [](double t) { return std::exp(-1.0 / t); };
    double previous = 1.0;
    for (double tmin : {1e-1, 3e-2, 1e-2, 3e-3}) {
        const double k = estimate_doubling(nu, log_space(tmin, 1.0, 100));
        CHECK(k < previous);
        previous = k;
    }
    CHECK(previous < 1e-100);
}

TEST_CASE("validate_modulus")
{
    CHECK(validate_modulus(ModulusSpec::holder(0.5), lin_space(0.0, 1.0, 64)).pass);
    const auto mu = ModulusSpec::psi_derived(PsiSpec::one_plus_log());
    CHECK(mu.tau0 > 0.0);
    CHECK(mu.tau0 <= 1.0 / kE);
    CHECK(validate_modulus(mu, default_modulus_grid(mu.tau0)).pass);

    const auto bad = ModulusSpec::custom({0.1, 0.2, 0.3, 0.4}, {0.1, 0.2, 0.15, 0.3});
    const auto rep = validate_modulus(bad, std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4});
    CHECK_FALSE(rep.pass);
    REQUIRE(rep.violation);
    CHECK(rep.violation->first == 0.2);
    CHECK(rep.violation->second == 0.3);
}

TEST_CASE("every modulus family is increasing and midpoint concave on its grid")
{
    std::vector<ModulusSpec> specs{ModulusSpec::holder(0.25), ModulusSpec::holder(0.5), ModulusSpec::holder(1.0)};
    for (const auto& psi : all_psi()) specs.push_back(ModulusSpec::psi_derived(psi));
    for (const auto& mu : specs) {
        CAPTURE(mu.name());
        const auto grid = default_modulus_grid(mu.tau0, 128);
        for (std::size_t i = 1; i < grid.size(); ++i) CHECK(eval_modulus(mu, grid[i]) > eval_modulus(mu, grid[i - 1]));
        CHECK(validate_modulus(mu, grid).pass);
    }
}

TEST_CASE("validate_psi reports the tail limits")
{
    const auto grid = default_psi_grid();
    const auto id = validate_psi(PsiSpec::identity(), grid);
    CHECK(id.pass);
    CHECK(id.chi_unbounded);
    CHECK(id.eta_estimate == doctest::Approx(1.0));
    CHECK(std::isinf(PsiSpec::identity().chi()));
    CHECK(PsiSpec::identity().eta() == 1.0);

    for (double a : {0.25, 1.0}) {
        const auto psi = PsiSpec::one_minus_exp(a);
        const auto rep = validate_psi(psi, grid);
        CHECK(rep.pass);
        CHECK_FALSE(rep.chi_unbounded);
        CHECK(rep.chi_estimate == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.eta_estimate == doctest::Approx(0.0));
        CHECK(psi.chi() == 1.0);
        CHECK(psi.eta() == 0.0);
    }

    const auto pb = validate_psi(PsiSpec::power_beta(0.5), grid);
    CHECK(pb.pass);
    CHECK(pb.chi_unbounded);
    CHECK(pb.eta_estimate < 1e-3);
    CHECK(PsiSpec::power_beta(0.5).eta() == 0.0);

    const auto ol = validate_psi(PsiSpec::one_plus_log(), grid);
    CHECK(ol.pass);
    CHECK(ol.chi_unbounded);
}

TEST_CASE("psi-derived modulus matches its closed form")
{
    const auto mu = ModulusSpec::psi_derived(PsiSpec::one_plus_log());
    for (double tau : log_space(1e-12, mu.tau0, 40)) {
        const double L = -std::log(tau);
        CHECK(eval_modulus(mu, tau) == doctest::Approx(tau * L / (1.0 + std::log(L))).epsilon(1e-13));
    }
}

TEST_CASE("invalid parameters are rejected")
{
    CHECK_THROWS_AS(ModulusSpec::holder(0.0), ValidationError);
    CHECK_THROWS_AS(ModulusSpec::holder(1.5), ValidationError);
    CHECK_THROWS_AS(PsiSpec::one_minus_exp(0.0), ValidationError);
    CHECK_THROWS_AS(PsiSpec::power_beta(2.0), ValidationError);
    CHECK_THROWS_AS(BlowupSpec::power(-1.0), ValidationError);
    CHECK_THROWS_AS(ModulusSpec::custom({0.2, 0.1}, {0.1, 0.2}), ValidationError);
}
