#include <benchmark/benchmark.h>

#include "hopfspec/eigensolver.hpp"
#include "hopfspec/fokker_planck.hpp"
#include "hopfspec/model.hpp"
#include "hopfspec/montecarlo.hpp"

using namespace hopfspec;

static void BM_Assemble(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ModelParams p{1.0, 1.0, 0.5, 0.4};
    Grid2D grid = build_grid(p, n, n, 5.0);
    for (auto _ : state) {
        auto gen = fokker_planck::assemble(p, grid);
        benchmark::DoNotOptimize(gen.adjoint.n_entries());
    }
    state.SetItemsProcessed(state.iterations() * grid.n_cells());
}
BENCHMARK(BM_Assemble)->Arg(100)->Arg(200);

static void BM_Matvec(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ModelParams p{1.0, 1.0, 0.5, 0.4};
    Grid2D grid = build_grid(p, n, n, 5.0);
    const auto gen = fokker_planck::assemble(p, grid);
    std::vector<double> x(grid.n_cells(), 1.0), y(grid.n_cells());
    for (auto _ : state) {
        gen.generator.apply(x.data(), y.data());
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * gen.generator.n_entries());
}
BENCHMARK(BM_Matvec)->Arg(100)->Arg(200);

static void BM_LeadingEigenvalues(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ModelParams p{-1.0, 1.0, 0.0, 1.0};
    Grid2D grid = build_grid(p, n, n, 5.0);
    const auto gen = fokker_planck::assemble(p, grid);
    eigensolver::ArnoldiOptions opts;
    opts.k = 6;
    opts.selection = eigensolver::Selection::largest_magnitude_of_shift_inverted;
    for (auto _ : state) {
        auto pairs = eigensolver::leading_eigenvalues(gen, 6, opts);
        benchmark::DoNotOptimize(pairs.size());
    }
}
BENCHMARK(BM_LeadingEigenvalues)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_EulerMaruyama(benchmark::State& state) {
    ModelParams p{1.0, 1.0, 0.5, 0.5};
    montecarlo::SimulationConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_steps = state.range(0);
    cfg.seed = 1;
    cfg.initial.kind = montecarlo::InitialCondition::Kind::fixed;
    cfg.initial.x = 1.0;
    cfg.record_stride = cfg.n_steps;  // keep allocation out of the loop
    for (auto _ : state) {
        auto traj = montecarlo::simulate(p, cfg);
        benchmark::DoNotOptimize(traj.x.back());
    }
    state.SetItemsProcessed(state.iterations() * cfg.n_steps);
}
BENCHMARK(BM_EulerMaruyama)->Arg(100000);

BENCHMARK_MAIN();
