#include <benchmark/benchmark.h>

#include <vector>

#include "ggof/cross_prob.hpp"
#include "ggof/stat_family.hpp"

using namespace ggof;

namespace {

// HC rejection boundary at a mid-range threshold: the workload every engine
// call reduces to.
std::vector<double> hc_boundary(int n) {
    return rejection_boundary(StatFamily::hc2004(), TruncationScheme::full(), n, 2.5);
}

void BM_CrossProbFullRange(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const BoundaryVector bounds = BoundaryVector::full(hc_boundary(n));
    for (auto _ : state) {
        benchmark::DoNotOptimize(cross_prob_iid(bounds).value);
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_CrossProbFullRange)->RangeMultiplier(2)->Range(16, 4096)->Complexity();

void BM_CrossProbTruncated(benchmark::State& state) {
    const int n = 2000;
    const int k1 = static_cast<int>(state.range(0));
    const TruncationScheme trunc = TruncationScheme::index_range(1, k1);
    const BoundaryVector bounds = BoundaryVector::ranged(
        rejection_boundary(StatFamily::hc2004(), trunc, n, 2.5), 1, k1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cross_prob_iid(bounds).value);
    }
    state.SetComplexityN(k1);
}
BENCHMARK(BM_CrossProbTruncated)->RangeMultiplier(2)->Range(16, 1024)->Complexity();

}  // namespace
