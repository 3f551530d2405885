#include <benchmark/benchmark.h>

#include "ggof/dep_pvalue.hpp"
#include "ggof/simulation.hpp"

using namespace ggof;

namespace {

void BM_SurvivalEqualCorr(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int nodes = static_cast<int>(state.range(1));
    QuadratureSpec quad;
    quad.node_count = nodes;
    for (auto _ : state) {
        benchmark::DoNotOptimize(survival_equal_corr(
            2.0, StatFamily::hc2004(), TruncationScheme::full(), n, 0.5,
            Sidedness::TwoSided, quad));
    }
}
BENCHMARK(BM_SurvivalEqualCorr)
    ->Args({20, 16})
    ->Args({20, 32})
    ->Args({20, 64})
    ->Args({100, 64});

void BM_SurvivalWam(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const CorrelationModel corr = correlation_model_for(CorrelationSpec::poly_decay(n, 0.5));
    for (auto _ : state) {
        benchmark::DoNotOptimize(survival_wam(2.0, StatFamily::hc2004(),
                                              TruncationScheme::full(), corr, 0.5,
                                              Sidedness::TwoSided));
    }
}
BENCHMARK(BM_SurvivalWam)->Arg(20)->Arg(50);

void BM_SurvivalLoess(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const CorrelationModel corr = CorrelationModel::general(
        gen_correlation(CorrelationSpec::two_block(n / 2, n - n / 2, 0.5, 0.2, 0.2)));
    QuadratureSpec quad;
    quad.node_count = static_cast<int>(state.range(1));
    LoessSpec loess;
    for (auto _ : state) {
        benchmark::DoNotOptimize(survival_loess(2.0, StatFamily::hc2004(),
                                                TruncationScheme::full(), corr, loess,
                                                Sidedness::TwoSided, 7, quad));
    }
}
BENCHMARK(BM_SurvivalLoess)->Args({20, 16})->Args({20, 24})->Args({20, 64});

void BM_MarginalStatistics(benchmark::State& state) {
    StudyConfig cfg;
    cfg.scenario = StudyConfig::Scenario::Linear;
    cfg.n = 20;
    cfg.n_obs = 1000;
    cfg.replicates = 100;
    cfg.correlation = CorrelationSpec::two_block(10, 10, 0.3, 0.3, 0.3);
    cfg.seed = 5;
    const GlmDataset ds = sample_glm_dataset(cfg, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(marginal_statistics(ds).t_m.sum());
    }
}
BENCHMARK(BM_MarginalStatistics);

}  // namespace
