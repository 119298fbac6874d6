#include <benchmark/benchmark.h>

#include "gkp/evolution.hpp"
#include "gkp/ground_state.hpp"

namespace {

void BM_PetviashviliIteration(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    gkp::GridSpec g{n, n, 64.0, 64.0};
    gkp::PetviashviliConfig cfg;
    cfg.maxIter = 40; // fixed iteration budget: measures per-iteration cost
    cfg.tol = 0.0;
    for (auto _ : state) {
        try {
            auto r = gkp::petviashvili(2.0, 1.0, g, cfg);
            benchmark::DoNotOptimize(r.residualNorm);
        } catch (const gkp::Error&) {
            // NoConvergence is expected with the truncated budget
        }
    }
}
BENCHMARK(BM_PetviashviliIteration)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_EvolutionStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    gkp::GridSpec g{n, n, 64.0, 64.0};
    gkp::PhysicalParams prm{1.0, 2.0, 2.0, 1.0, 0.0, -1};
    gkp::TimeStepperConfig cfg;
    gkp::Stepper st(g, prm, cfg);
    gkp::Field u0 = gkp::Field::sample(
        g, [](double x, double y) { return std::exp(-(x * x + y * y) / 16.0); });
    st.set_state(u0);
    const double dt = st.auto_dt();
    for (auto _ : state) {
        st.step(dt);
        benchmark::DoNotOptimize(st.spectrum().data());
    }
}
BENCHMARK(BM_EvolutionStep)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

} // namespace
