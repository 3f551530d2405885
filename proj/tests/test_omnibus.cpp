#include "ggof/omnibus.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ggof/errors.hpp"
#include "ggof/rng.hpp"
#include "ggof/simulation.hpp"
#include "oracles.hpp"

using namespace ggof;

namespace {

std::vector<double> random_pvalues(int n, RngStream& rng) {
    std::vector<double> p(n);
    for (double& v : p) v = rng.uniform();
    return p;
}

}  // namespace

TEST_CASE("default grid crosses the phi families with the index truncations") {
    const AdaptationGrid grid = AdaptationGrid::default_grid(20);
    CHECK(grid.entries.size() == 16);  // 4 s-values x k0 in {1,2} x k1 in {10,20}
    CHECK(grid.n == 20);
}

TEST_CASE("singleton grid collapses to the single test") {
    RngStream rng(2101, 1);
    const int n = 10;
    const std::vector<double> p = random_pvalues(n, rng);
    AdaptationGrid grid;
    grid.n = n;
    grid.entries.push_back({StatFamily::hc2004(), TruncationScheme::full()});

    PvalueOptions opts;
    opts.sided = Sidedness::OneSided;
    const CorrelationModel ident = CorrelationModel::identity(n);
    const OmnibusResult res = diggof_statistic(p, grid, ident, opts);

    const GofResult stat = compute_statistic(p, StatFamily::hc2004(), TruncationScheme::full());
    CHECK(res.s_o == pvalue(stat, ident, opts));
    CHECK(res.chosen_entry == 0);

    OmnibusOptions oo;
    oo.pv = opts;
    CHECK(diggof_pvalue(res, grid, ident, oo) == doctest::Approx(res.s_o).epsilon(1e-6));

    // Same collapse under the exact equal-correlation engine.
    const CorrelationModel eq = CorrelationModel::equal(n, 0.3);
    const OmnibusResult res_eq = diggof_statistic(p, grid, eq, opts);
    CHECK(diggof_pvalue(res_eq, grid, eq, oo) == doctest::Approx(res_eq.s_o).epsilon(1e-6));
}

TEST_CASE("duplicated grid entries are idempotent") {
    RngStream rng(2102, 2);
    const int n = 8;
    const std::vector<double> p = random_pvalues(n, rng);
    AdaptationGrid grid;
    grid.n = n;
    grid.entries.push_back({StatFamily::berk_jones(), TruncationScheme::index_range(1, 4)});
    AdaptationGrid doubled = grid;
    doubled.entries.push_back(grid.entries[0]);

    PvalueOptions opts;
    const CorrelationModel ident = CorrelationModel::identity(n);
    const OmnibusResult a = diggof_statistic(p, grid, ident, opts);
    const OmnibusResult b = diggof_statistic(p, doubled, ident, opts);
    CHECK(a.s_o == b.s_o);
    CHECK(b.per_entry_pvalues[0] == b.per_entry_pvalues[1]);
    CHECK(b.chosen_entry == 0);  // ties break to the lowest index
}

TEST_CASE("two-entry grid takes the minimum of the recomputed p-values") {
    RngStream rng(2103, 3);
    const int n = 10;
    PvalueOptions opts;
    opts.sided = Sidedness::OneSided;
    const CorrelationModel ident = CorrelationModel::identity(n);
    AdaptationGrid grid;
    grid.n = n;
    grid.entries.push_back({StatFamily::hc2004(), TruncationScheme::index_range(1, 5)});
    grid.entries.push_back({StatFamily::berk_jones(), TruncationScheme::index_range(1, 5)});
    for (int rep = 0; rep < 40; ++rep) {
        const std::vector<double> p = random_pvalues(n, rng);
        const OmnibusResult res = diggof_statistic(p, grid, ident, opts);
        const double p_hc = pvalue(
            compute_statistic(p, grid.entries[0].family, grid.entries[0].trunc), ident, opts);
        const double p_bj = pvalue(
            compute_statistic(p, grid.entries[1].family, grid.entries[1].trunc), ident, opts);
        CHECK(res.s_o == std::min(p_hc, p_bj));
    }
}

TEST_CASE("critical_threshold inverts the survival function") {
    const CorrelationModel ident = CorrelationModel::identity(12);
    PvalueOptions opts;
    opts.sided = Sidedness::OneSided;
    const GridEntry hc{StatFamily::hc2004(), TruncationScheme::full()};

    // Round trip from a precomputed threshold.
    const double b_star = 2.7;
    const double s_star = 1.0 - survival_iid(b_star, hc.family, hc.trunc, 12);
    const ThresholdResult inv = critical_threshold(hc, s_star, ident, opts);
    CHECK_FALSE(inv.clamped);
    CHECK(survival_iid(inv.b, hc.family, hc.trunc, 12) ==
          doctest::Approx(1.0 - s_star).epsilon(1e-7));

    // Bonferroni closed form: (1 - alpha/n + b)^n = 1 - s.
    const double alpha = 0.05;
    const int n = 12;
    const GridEntry bonf{StatFamily::bonferroni(alpha), TruncationScheme::full()};
    const double target = 0.02;
    const double want = std::pow(1.0 - target, 1.0 / n) - 1.0 + alpha / n;
    CHECK(critical_threshold(bonf, target, ident, opts).b ==
          doctest::Approx(want).epsilon(1e-6));

    // Equal-correlation engine round trip.
    const CorrelationModel eq = CorrelationModel::equal(12, 0.3);
    PvalueOptions eq_opts;
    eq_opts.sided = Sidedness::TwoSided;
    const ThresholdResult t_eq = critical_threshold(hc, 0.04, eq, eq_opts);
    const double back = survival_equal_corr(t_eq.b, hc.family, hc.trunc, 12, 0.3,
                                            Sidedness::TwoSided);
    CHECK(back == doctest::Approx(0.96).epsilon(1e-6));
}

TEST_CASE("omnibus dominance: s_o <= p <= |grid| * s_o under independence") {
    RngStream rng(2104, 4);
    const int n = 12;
    const CorrelationModel ident = CorrelationModel::identity(n);
    const AdaptationGrid grid = AdaptationGrid::default_grid(n);
    PvalueOptions opts;
    opts.sided = Sidedness::OneSided;
    OmnibusOptions oo;
    oo.pv = opts;
    for (int rep = 0; rep < 100; ++rep) {
        const std::vector<double> p = random_pvalues(n, rng);
        const OmnibusResult res = diggof_statistic(p, grid, ident, opts);
        const double pd = diggof_pvalue(res, grid, ident, oo);
        CHECK(pd >= res.s_o - 1e-6);
        CHECK(pd <= grid.entries.size() * res.s_o + 1e-6);
    }
}

TEST_CASE("adding a grid entry tightens s_o and widens the boundary") {
    RngStream rng(2105, 5);
    const int n = 10;
    const CorrelationModel ident = CorrelationModel::identity(n);
    PvalueOptions opts;
    AdaptationGrid small;
    small.n = n;
    small.entries.push_back({StatFamily::hc2004(), TruncationScheme::full()});
    AdaptationGrid big = small;
    big.entries.push_back({StatFamily::berk_jones(), TruncationScheme::index_range(1, 5)});

    OmnibusOptions oo;
    oo.pv = opts;
    for (int rep = 0; rep < 25; ++rep) {
        const std::vector<double> p = random_pvalues(n, rng);
        const OmnibusResult rs = diggof_statistic(p, small, ident, opts);
        const OmnibusResult rb = diggof_statistic(p, big, ident, opts);
        CHECK(rb.s_o <= rs.s_o);

        // At the same survival level the pooled boundary dominates pointwise.
        std::vector<double> u_small, u_big;
        OmnibusResult level;
        level.s_o = 0.05;
        diggof_pvalue(level, small, ident, oo, &u_small);
        diggof_pvalue(level, big, ident, oo, &u_big);
        for (int i = 0; i < n; ++i) CHECK(u_big[i] >= u_small[i] - 1e-12);
    }
}

TEST_CASE("diggof p-values are roughly uniform under the identity null") {
    const int n = 10;
    const CorrelationModel ident = CorrelationModel::identity(n);
    const AdaptationGrid grid = AdaptationGrid::default_grid(n);
    PvalueOptions opts;
    opts.sided = Sidedness::OneSided;
    OmnibusOptions oo;
    oo.pv = opts;
    const int reps = 1000;
    std::vector<double> ps(reps);
    for (int rep = 0; rep < reps; ++rep) {
        RngStream rng(515151, substream(9, rep));
        std::vector<double> p(n);
        for (double& v : p) v = rng.uniform();
        const OmnibusResult res = diggof_statistic(p, grid, ident, opts);
        ps[rep] = diggof_pvalue(res, grid, ident, oo);
    }
    CHECK(oracle::ks_uniform_distance(ps) <= 0.05);
}

TEST_CASE("fast probe inversion tracks the honest LOESS inversion") {
    const int n = 12;
    const CorrelationModel gen = CorrelationModel::general(
        gen_correlation(CorrelationSpec::two_block(6, 6, 0.5, 0.2, 0.2)));
    AdaptationGrid grid;
    grid.n = n;
    grid.entries.push_back({StatFamily::hc2004(), TruncationScheme::index_range(1, 6)});
    grid.entries.push_back({StatFamily::berk_jones(), TruncationScheme::index_range(1, 6)});

    PvalueOptions opts;
    opts.sided = Sidedness::TwoSided;
    opts.seed = 77;
    OmnibusResult level;
    level.s_o = 0.05;

    OmnibusOptions honest;
    honest.pv = opts;
    honest.fast_inversion = false;
    OmnibusOptions fast;
    fast.pv = opts;
    fast.fast_inversion = true;
    const double p_honest = diggof_pvalue(level, grid, gen, honest);
    const double p_fast = diggof_pvalue(level, grid, gen, fast);
    CHECK(std::abs(p_honest - p_fast) <= 0.02);
}
