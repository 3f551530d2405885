#pragma once

#include <span>
#include <string>
#include <vector>

#include "ggof/dep_pvalue.hpp"
#include "ggof/stat_family.hpp"

namespace ggof {

// Double adaptation: the test statistic is the smallest single-test p-value
// over a grid of (kernel, truncation) pairs, and its null distribution is
// again a cross-boundary probability.
struct GridEntry {
    StatFamily family;
    TruncationScheme trunc;
    std::string label() const;
};

struct AdaptationGrid {
    std::vector<GridEntry> entries;
    int n = 0;

    // phi-divergence s in {-1, 0, 1, 2} crossed with k0 in {1, 2} and
    // k1 in {ceil(n/2), n}.
    static AdaptationGrid default_grid(int n);
    static AdaptationGrid cross(const std::vector<double>& s_values,
                                const std::vector<int>& k0s,
                                const std::vector<int>& k1s, int n);
    void validate() const;
};

struct OmnibusResult {
    double s_o = 1.0;                      // min single-test p-value
    int chosen_entry = 0;                  // grid index attaining it
    std::vector<double> per_entry_pvalues;
};

// Per-entry statistics and p-values through the selected engine; ties break
// toward the lowest grid index.
OmnibusResult diggof_statistic(std::span<const double> pvalues,
                               const AdaptationGrid& grid,
                               const CorrelationModel& corr,
                               const PvalueOptions& opts,
                               EngineWarnings* warnings = nullptr);

struct ThresholdResult {
    double b = 0.0;
    bool clamped = false;  // target was outside the achievable range
};

// b with 1 - survival(b) = target, by bisection on the engine's survival
// function; tolerance 1e-8 in probability.
ThresholdResult critical_threshold(const GridEntry& entry, double target,
                                   const CorrelationModel& corr,
                                   const PvalueOptions& opts,
                                   EngineWarnings* warnings = nullptr);

struct OmnibusOptions {
    PvalueOptions pv;
    // Under the LOESS engine a full bisection re-runs the design grid per
    // iteration; studies use a probe-curve inversion instead (Brent on the
    // sampled-rho mixture survival).
    bool fast_inversion = false;
};

// Survival-level boundary u*_i = max_j f_j^{-1}(i/n, G_j^{-1}(s_o)) and its
// cross-boundary probability under the matching engine. Optionally exposes
// the assembled boundary.
double diggof_pvalue(const OmnibusResult& result, const AdaptationGrid& grid,
                     const CorrelationModel& corr, const OmnibusOptions& opts,
                     std::vector<double>* u_star_out = nullptr,
                     EngineWarnings* warnings = nullptr);

}  // namespace ggof
