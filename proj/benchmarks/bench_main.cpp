#include <benchmark/benchmark.h>

#include <vector>

#include "wellpose/coefficients.hpp"
#include "wellpose/energy.hpp"
#include "wellpose/grid.hpp"
#include "wellpose/mollify.hpp"

using namespace wellpose;

namespace {

const CoefficientField& holder()
{
    static const auto f = make_test_coefficient(TestFamily::HolderSingular, {});
    return f;
}

const CoefficientField& psi()
{
    static const auto f = make_test_coefficient(TestFamily::PsiSingular, {});
    return f;
}

}  // namespace

// range(0): -log10 eps
static void BM_MollifyValue(benchmark::State& state)
{
    const double eps = std::pow(10.0, -static_cast<double>(state.range(0)));
    const MollifiedCoefficient mc(holder(), eps);
    const auto ts = log_space(1e-5, 1.0, 64);
    for (auto _ : state)
        for (double t : ts) benchmark::DoNotOptimize(mollify_value(mc, t));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(ts.size()));
}
BENCHMARK(BM_MollifyValue)->DenseRange(1, 3);

static void BM_MollifyDerivativePsi(benchmark::State& state)
{
    const MollifiedCoefficient mc(psi(), 1e-3);
    const auto ts = log_space(1e-5, 1.0, 64);
    for (auto _ : state)
        for (double t : ts) benchmark::DoNotOptimize(mollify_derivative(mc, t));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(ts.size()));
}
BENCHMARK(BM_MollifyDerivativePsi);

// range(0): |xi|
static void BM_GronwallBound(benchmark::State& state)
{
    const double xi = static_cast<double>(state.range(0));
    GronwallOptions o;
    o.tol = 1e-9;
    o.t_start = 0.02;
    for (auto _ : state)
        benchmark::DoNotOptimize(gronwall_bound(holder(), std::vector<double>{xi}, 1.0 / xi, o).total);
}
BENCHMARK(BM_GronwallBound)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_IntegrateMode(benchmark::State& state)
{
    const double xi = static_cast<double>(state.range(0));
    ModeOptions o;
    o.t_start = 0.02;
    for (auto _ : state)
        benchmark::DoNotOptimize(integrate_mode(holder(), std::vector<double>{xi}, 1.0, 0.0, 1.0, o).u.back());
}
BENCHMARK(BM_IntegrateMode)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_ApproximationGrid(benchmark::State& state)
{
    const auto eps = log_space(1e-3, 1e-1, 16);
    const auto ts = log_space(1e-5, 1.0, 16);
    for (auto _ : state) benchmark::DoNotOptimize(verify_approximation(holder(), MollifierKernel::bump(), eps, ts).all_pass);
}
BENCHMARK(BM_ApproximationGrid)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
