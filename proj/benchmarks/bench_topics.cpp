#include <benchmark/benchmark.h>

#include "newspulse/spline.hpp"
#include "newspulse/topics.hpp"
#include "oracles/topic_gen.hpp"

using namespace newspulse;

static void BM_TopicFit(benchmark::State& state) {
    auto corpus = oracle::planted_disjoint(5, int(state.range(0)), 3, 20, 60);
    Eigen::MatrixXd basis = spline_basis(corpus.weeks, 4);
    TopicFitOptions opts;
    opts.max_iterations = 20;
    opts.rel_tol = 0;
    opts.n_starts = 1;
    for (auto _ : state) {
        TopicModel model = fit_model(corpus.docs, corpus.vocab_size, basis, 3, 5, opts);
        benchmark::DoNotOptimize(model.phi);
    }
    state.SetLabel("20 EM iterations");
}
BENCHMARK(BM_TopicFit)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_SplineBasis(benchmark::State& state) {
    std::vector<double> weeks;
    for (int i = 0; i < int(state.range(0)); ++i) weeks.push_back(double(i % 45));
    for (auto _ : state) {
        Eigen::MatrixXd basis = spline_basis(weeks, 10);
        benchmark::DoNotOptimize(basis);
    }
}
BENCHMARK(BM_SplineBasis)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
