#include <benchmark/benchmark.h>

#include "kgnr/data.hpp"
#include "kgnr/field.hpp"
#include "kgnr/grid.hpp"
#include "kgnr/kg.hpp"
#include "kgnr/nls.hpp"
#include "kgnr/spectral.hpp"

namespace {

using namespace kgnr;

Field datum(const GridPtr& g) { return gaussian_data(1.0, 1.0, {0.0, 0.0}, g); }

Field datum(int n) { return datum(make_grid(n, 16.0 * kPi)); }

void bm_dealiased_cube(benchmark::State& state) {
    const Field f = datum(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(dealiased_cube(f, f, f));
}
BENCHMARK(bm_dealiased_cube)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void bm_sobolev_norm(benchmark::State& state) {
    const Field f = datum(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sobolev_norm(f, 1.0));
}
BENCHMARK(bm_sobolev_norm)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void bm_nls_step(benchmark::State& state) {
    const int n = int(state.range(0));
    NLSParams p;
    p.lambda = 1.0;
    p.grid = make_grid(n, 16.0 * kPi);
    p.dt = 1e-3;
    p.t_final = 1.0;
    const Field g0 = init_g0(datum(p.grid), Field::zeros(p.grid, Field::Kind::Real));
    for (auto _ : state) benchmark::DoNotOptimize(nls_step(g0, p, 1e-3));
}
BENCHMARK(bm_nls_step)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void bm_kg_step(benchmark::State& state) {
    const int n = int(state.range(0));
    KGParams p;
    p.eps = 0.2;
    p.lambda = 1.0;
    p.grid = make_grid(n, 16.0 * kPi);
    p.t_final = 1.0;
    const KGState s = kg_init(datum(p.grid), Field::zeros(p.grid, Field::Kind::Real), 0.2);
    const double dt = default_dt(p);
    for (auto _ : state) benchmark::DoNotOptimize(kg_step(s, p, dt));
}
BENCHMARK(bm_kg_step)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
