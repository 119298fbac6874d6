#include <benchmark/benchmark.h>

#include <random>

#include "gkp/functionals.hpp"
#include "gkp/operators.hpp"

namespace {

gkp::Field make_field(int n) {
    gkp::GridSpec g{n, n, 64.0, 64.0};
    std::mt19937_64 rng(7);
    return gkp::random_smooth_field(g, rng, 1.0);
}

void BM_TransformRoundTrip(benchmark::State& state) {
    gkp::Field f = make_field(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        gkp::Field g = gkp::inverse_transform(gkp::transform(f));
        benchmark::DoNotOptimize(g.data());
    }
}
BENCHMARK(BM_TransformRoundTrip)->Arg(128)->Arg(256)->Arg(512);

void BM_FractionalDerivative(benchmark::State& state) {
    gkp::Field f = make_field(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        gkp::Field g = gkp::dx_frac(f, 1.5);
        benchmark::DoNotOptimize(g.data());
    }
}
BENCHMARK(BM_FractionalDerivative)->Arg(256);

void BM_DiagnosticsRecord(benchmark::State& state) {
    gkp::Field f = make_field(static_cast<int>(state.range(0)));
    gkp::PhysicalParams prm{1.0, 2.0, 2.0, 1.0, -0.1, -1};
    for (auto _ : state) {
        auto r = gkp::DiagnosticsRecord::compute(f, prm);
        benchmark::DoNotOptimize(r.mass);
    }
}
BENCHMARK(BM_DiagnosticsRecord)->Arg(256);

} // namespace

BENCHMARK_MAIN();
