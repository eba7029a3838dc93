#include "wzlab/cadlag.hpp"
#include "wzlab/drivers.hpp"
#include "wzlab/skorokhod.hpp"
#include "wzlab/smoothing.hpp"
#include "wzlab/solvers.hpp"
#include "wzlab/timechange.hpp"

#include <benchmark/benchmark.h>

using namespace wzlab;

namespace {

DriverPath driver(double dt) {
    return simulate(DriverSpec::jump_diffusion(1.0, 0.0, 2.0, JumpLaw::normal(0.0, 1.0), 1.0, dt), {20240601, 0});
}

const CoefficientSet kCoeffs{CoefficientFamily::tanh_scaled(0.5, 1.0), CoefficientFamily::sin_scaled(1.0, 1.0)};

}  // namespace

static void BM_Simulate(benchmark::State& state) {
    const double dt = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(driver(dt));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Simulate)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

static void BM_SmoothAndSample(benchmark::State& state) {
    const DriverPath d = driver(1e-3);
    for (auto _ : state) {
        const SmoothedPath l = smooth(d.path, 0.02);
        benchmark::DoNotOptimize(l.to_path());
    }
}
BENCHMARK(BM_SmoothAndSample);

static void BM_TimeChangeBuild(benchmark::State& state) {
    const DriverPath d = driver(1e-3);
    const auto qv = quadratic_variation_split(d.path, d.continuous_qv);
    for (auto _ : state) benchmark::DoNotOptimize(TimeChangeSystem::build(qv, d.path.jumps(), 0.02));
}
BENCHMARK(BM_TimeChangeBuild);

static void BM_RandomOde(benchmark::State& state) {
    const DriverPath d = driver(1e-3);
    const SmoothedPath l = smooth(d.path, 0.02);
    SolverConfig cfg;
    cfg.x0 = 0.1;
    for (auto _ : state) benchmark::DoNotOptimize(solve_random_ode(kCoeffs, l, cfg));
}
BENCHMARK(BM_RandomOde);

static void BM_Marcus(benchmark::State& state) {
    const DriverPath d = driver(1e-3);
    const auto qv = quadratic_variation_split(d.path, d.continuous_qv);
    SolverConfig cfg;
    cfg.x0 = 0.1;
    for (auto _ : state) benchmark::DoNotOptimize(solve_marcus(kCoeffs, d.path, qv, cfg));
}
BENCHMARK(BM_Marcus);

static void BM_DM1(benchmark::State& state) {
    const DriverPath d = driver(1e-3);
    SolverConfig cfg;
    cfg.x0 = 0.1;
    const CadlagPath x = solve_marcus(kCoeffs, d.path, quadratic_variation_split(d.path, d.continuous_qv), cfg);
    const CadlagPath xe = solve_random_ode(kCoeffs, smooth(d.path, 0.05), cfg);
    const int m = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(d_m1(xe, x, m));
}
BENCHMARK(BM_DM1)->Arg(128)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

static void BM_WPrime(benchmark::State& state) {
    const DriverPath d = driver(1e-3);
    for (auto _ : state) benchmark::DoNotOptimize(w_prime(d.path, 0.05));
}
BENCHMARK(BM_WPrime);

BENCHMARK_MAIN();
