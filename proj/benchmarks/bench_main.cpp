#include <benchmark/benchmark.h>

#include "cnl/ensemble.hpp"
#include "cnl/integrator.hpp"

namespace {

cnl::SystemConfig system(cnl::Scheme scheme) {
    cnl::SystemConfig c;
    c.particles[0] = {8e-17, 5e4, 0.0, 1e-4, 300.0};
    c.particles[1] = {8e-17, 5e4, 0.0, 1e-4, 300.0};
    c.coupling.kappa = 2.3e-24;
    c.coupling.separation = 3e-6;
    c.integration.scheme = scheme;
    return c;
}

void BM_Step(benchmark::State& state) {
    const auto scheme = static_cast<cnl::Scheme>(state.range(0));
    const auto cfg = system(scheme);
    const auto integ = cnl::LangevinIntegrator::from_config(cfg, cnl::make_unit_scales(cfg));
    const auto coeff = integ.coefficients(integ.default_dt());
    cnl::RandomStream rng(1, 0);
    cnl::PhasePoint x{0.01, 0.0, 0.0, 0.0, 0.0};
    for (auto _ : state) {
        integ.step(x, coeff, rng);
        benchmark::DoNotOptimize(x);
    }
    state.SetItemsProcessed(state.iterations());
    state.SetLabel(std::string(cnl::to_string(scheme)));
}
BENCHMARK(BM_Step)->Arg(static_cast<int>(cnl::Scheme::SplitExactHarmonic))
    ->Arg(static_cast<int>(cnl::Scheme::StochasticHeun));

void BM_Ensemble(benchmark::State& state) {
    const auto cfg = system(cnl::Scheme::SplitExactHarmonic);
    const std::array<cnl::GaussianState, 2> st{cnl::thermally_squeezed_state(cfg.particles[0], 300.0, 30e-9),
                                               cnl::thermal_state(cfg.particles[1], 0.01)};
    cnl::EnsembleConfig e;
    e.n_trajectories = static_cast<std::size_t>(state.range(0));
    e.output_times = {0.0, 5e-6, 1e-5, 1.5e-5, 2e-5};
    e.bootstrap_resamples = 0;
    e.workers = 1;
    for (auto _ : state) benchmark::DoNotOptimize(cnl::simulate_ensemble(cfg, st, e));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ensemble)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Bootstrap(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    cnl::SampleMatrix m({0.0, 1.0, 2.0, 3.0}, n);
    cnl::RandomStream rng(3, 0);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (int v = 0; v < 4; ++v) m.at(k, static_cast<cnl::Variable>(v), j) = rng.normal();
    for (std::size_t j = 0; j < n; ++j) m.set_alive_length(j, 4);
    cnl::EnsembleConfig e;
    e.n_trajectories = n;
    e.output_times = m.times();
    e.bootstrap_resamples = 200;
    e.workers = 1;
    for (auto _ : state) benchmark::DoNotOptimize(cnl::reduce_samples(m, e));
}
BENCHMARK(BM_Bootstrap)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
