#include <benchmark/benchmark.h>

#include "newspulse/glm.hpp"
#include "oracles/glm_gen.hpp"

using namespace newspulse;

static void BM_FitGroupedBinomial(benchmark::State& state) {
    int outlets = int(state.range(0));
    GlmData data = oracle::simulate_grouped(17, outlets, 30, 0.5, -0.25, 40);
    for (auto _ : state) {
        GlmFit fit = fit_glm(data);
        benchmark::DoNotOptimize(fit.beta);
    }
    state.SetLabel(std::to_string(data.n_rows()) + " rows");
}
BENCHMARK(BM_FitGroupedBinomial)->Arg(10)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);

static void BM_ClusteredVcov(benchmark::State& state) {
    GlmData data = oracle::simulate_grouped(17, int(state.range(0)), 30, 0.5, -0.25, 40);
    GlmFit fit = fit_glm(data);
    for (auto _ : state) {
        Eigen::MatrixXd v = clustered_vcov(fit, data.outlet);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_ClusteredVcov)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
