#include <benchmark/benchmark.h>

#include "wnlab/conditions.hpp"
#include "wnlab/wave1d.hpp"

using namespace wnlab;

namespace {

AsymptoticSystem rigid() { return asymptotic_system(catalogue("rigid_body", std::vector<double>{1.0, 2.0, 3.0})); }

void BM_IntegrateRigidBody(benchmark::State& state) {
    const auto sys = rigid();
    const double s_max = static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto traj = integrate(sys, Vector{0.05, -0.05, 0.05}, s_max);
        benchmark::DoNotOptimize(traj.back().data());
    }
}
BENCHMARK(BM_IntegrateRigidBody)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_IntegrateForced(benchmark::State& state) {
    const auto sys = rigid();
    const auto f = make_forcing(ForcingKind::random_piecewise, 3, 1.0, 0.01, 0.5, 1,
                                sys.structure()->hamiltonian.form());
    for (auto _ : state) {
        auto traj = integrate(sys, Vector{0.01, 0.01, -0.01}, 100.0, f);
        benchmark::DoNotOptimize(traj.back().data());
    }
}
BENCHMARK(BM_IntegrateForced)->Unit(benchmark::kMillisecond);

void BM_ClassifySuperExponential(benchmark::State& state) {
    const auto sys = asymptotic_system(catalogue("super_exponential"));
    for (auto _ : state) benchmark::DoNotOptimize(classify_growth(sys, 0.3, 100.0).value);
}
BENCHMARK(BM_ClassifySuperExponential)->Unit(benchmark::kMillisecond);

void BM_Condition1(benchmark::State& state) {
    const auto sys = rigid();
    Condition1Params p;
    p.trials = 32;
    p.threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(check_condition_1(sys, p).c_tilde_empirical);
}
BENCHMARK(BM_Condition1)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Evolve(benchmark::State& state) {
    const auto spec = catalogue("rigid_body", std::vector<double>{1.0, 2.0, 3.0});
    const double h = 1.0 / static_cast<double>(state.range(0));
    const auto data = bump_data(0, 1, 2, 12, {{0.1, 0.4, 0.25}, {0.1, 0.5, 0.25}, {-0.1, 0.6, 0.25}});
    std::size_t cells = 0;
    for (auto _ : state) {
        const auto g = evolve(spec, data, h);
        cells = g.stats().cells;
        benchmark::DoNotOptimize(g.psi(0, g.rows() - 1, g.cols() - 1));
    }
    state.SetItemsProcessed(static_cast<int64_t>(cells) * state.iterations());
}
BENCHMARK(BM_Evolve)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
