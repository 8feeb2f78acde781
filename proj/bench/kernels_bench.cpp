// Serial reference path against the OpenMP kernels.
//   kernels_bench --benchmark_filter=Geometry

#include <benchmark/benchmark.h>

#include "mcf/flow.hpp"
#include "mcf/scenarios.hpp"
#include "mcf/structure_checks.hpp"

using namespace mcf;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& st) { st.SetLabel(st.range(1) ? "parallel" : "serial"); }

void BM_Geometry(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    const auto im = generic_torus(1.0, 2.0, 0.3, N, N);
    GeometryOptions o;
    o.exec = exec_of(st);
    for (auto _ : st) benchmark::DoNotOptimize(build_geometry(im, o));
    st.SetItemsProcessed(st.iterations() * N * N);
    label(st);
}

void BM_Velocity(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    const auto im = generic_torus(1.0, 2.0, 0.3, N, N);
    FlowOptions o;
    o.exec = exec_of(st);
    for (auto _ : st) benchmark::DoNotOptimize(velocity(im, o));
    st.SetItemsProcessed(st.iterations() * N * N);
    label(st);
}

void BM_Rk4Step(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    const auto im = generic_torus(1.0, 2.0, 0.3, N, N);
    FlowOptions o;
    o.exec = exec_of(st);
    const double dt = stable_dt(im, o);
    for (auto _ : st) benchmark::DoNotOptimize(step(im, dt, o));
    label(st);
}

void BM_StructureChecks(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    const auto gs = build_geometry(generic_torus(1.0, 2.0, 0.3, N, N));
    for (auto _ : st) benchmark::DoNotOptimize(check_structure_equations(gs, exec_of(st)));
    label(st);
}

void sizes(benchmark::internal::Benchmark* b) {
    for (int n : {32, 64, 128})
        for (int par : {0, 1}) b->Args({n, par});
    b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_Geometry)->Apply(sizes);
BENCHMARK(BM_Velocity)->Apply(sizes);
BENCHMARK(BM_Rk4Step)->Apply(sizes);
BENCHMARK(BM_StructureChecks)->Apply(sizes);
BENCHMARK_MAIN();
