#include "ggof/stat_family.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ggof/errors.hpp"
#include "ggof/rng.hpp"
#include "oracles.hpp"

using namespace ggof;

TEST_CASE("kernel closed-form values") {
    // HC2004 at (0.5, 0.2), n=100: 10 * 0.3 / sqrt(0.16)
    CHECK(f_eval(StatFamily::hc2004(), 0.5, 0.2, 100) == doctest::Approx(7.5).epsilon(1e-12));
    CHECK(f_eval(StatFamily::ks_plus(), 0.3, 0.1, 5) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(f_eval(StatFamily::bonferroni(0.05), 0.3, 0.001, 10) ==
          doctest::Approx(0.05 / 10 - 0.001).epsilon(1e-12));
    CHECK(f_eval(StatFamily::fdr(0.1), 0.5, 0.01, 10) ==
          doctest::Approx(0.1 * 0.5 - 0.01).epsilon(1e-12));
}

TEST_CASE("phi-divergence kernels match the literal transcription") {
    RngStream rng(7031, 1);
    for (double s : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        const StatFamily fam = StatFamily::phi_divergence(s);
        for (int rep = 0; rep < 250; ++rep) {
            const double x = 0.02 + 0.96 * rng.uniform();
            const double y = 0.02 + 0.96 * rng.uniform();
            const double got = f_eval(fam, x, y, 50);
            const double want = oracle::phi_oneside_literal(s, x, y, 50);
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("family equivalences: s=2 is HC2004, s=-1 is HC2008") {
    RngStream rng(99, 2);
    for (int rep = 0; rep < 2000; ++rep) {
        const double x = 0.01 + 0.98 * rng.uniform();
        const double y = 0.01 + 0.98 * rng.uniform();
        const double hc04 = f_eval(StatFamily::phi_divergence(2.0), x, y, 64);
        const double hc08 = f_eval(StatFamily::phi_divergence(-1.0), x, y, 64);
        CHECK(hc04 == doctest::Approx(oracle::hc2004_literal(x, y, 64)).epsilon(1e-10));
        CHECK(hc08 == doctest::Approx(oracle::hc2008_literal(x, y, 64)).epsilon(1e-10));
    }
}

TEST_CASE("kernels decrease strictly in y") {
    RngStream rng(4242, 3);
    const std::vector<StatFamily> fams{
        StatFamily::hc2004(), StatFamily::hc2008(), StatFamily::berk_jones(),
        StatFamily::reverse_berk_jones(), StatFamily::phi_divergence(0.5),
        StatFamily::ks_plus(), StatFamily::bonferroni(0.05), StatFamily::fdr(0.1)};
    for (const StatFamily& fam : fams) {
        for (int rep = 0; rep < 200; ++rep) {
            const double x = 0.05 + 0.9 * rng.uniform();
            double y1 = 0.05 + 0.9 * rng.uniform();
            double y2 = 0.05 + 0.9 * rng.uniform();
            if (y1 == y2) continue;
            if (y1 > y2) std::swap(y1, y2);
            CHECK(f_eval(fam, x, y1, 30) > f_eval(fam, x, y2, 30));
        }
    }
}

TEST_CASE("f_inverse closed forms and round trips") {
    CHECK(f_inverse(StatFamily::hc2004(), 0.4, 0.0, 25) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(f_inverse(StatFamily::ks_plus(), 0.3, 0.1, 5) == doctest::Approx(0.2).epsilon(1e-12));

    // Bisection family: verify by round trip.
    const StatFamily half = StatFamily::phi_divergence(0.5);
    const double u = f_inverse(half, 0.25, 2.0, 50);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(f_eval(half, 0.25, u, 50) == doctest::Approx(2.0).epsilon(1e-10));

    RngStream rng(515, 4);
    const std::vector<StatFamily> fams{
        StatFamily::hc2004(), StatFamily::hc2008(), StatFamily::berk_jones(),
        StatFamily::reverse_berk_jones(), StatFamily::phi_divergence(1.7),
        StatFamily::ks_plus(), StatFamily::fdr(0.2)};
    for (const StatFamily& fam : fams) {
        for (int rep = 0; rep < 300; ++rep) {
            const double x = 0.05 + 0.9 * rng.uniform();
            const double b = -3.0 + 6.0 * rng.uniform();
            const double y = f_inverse(fam, x, b, 40);
            if (y > 1e-9 && y < 1.0 - 1e-9) {
                CHECK(f_eval(fam, x, y, 40) == doctest::Approx(b).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("f_inverse saturates to 0 and 1") {
    // Even the smallest p cannot reach a huge threshold: u = 0.
    CHECK(f_inverse(StatFamily::ks_plus(), 0.3, 2.0, 5) == 0.0);
    // Every p exceeds a very low threshold: u = 1.
    CHECK(f_inverse(StatFamily::ks_plus(), 0.3, -2.0, 5) == 1.0);
    CHECK(f_inverse(StatFamily::berk_jones(), 0.5, 1e9, 10) == 0.0);
    CHECK(f_inverse(StatFamily::berk_jones(), 0.5, -1e9, 10) == 1.0);
}

TEST_CASE("compute_statistic on the uniform grid") {
    const std::vector<double> p{0.2, 0.4, 0.6, 0.8, 1.0};
    const GofResult r = compute_statistic(p, StatFamily::ks_plus(), TruncationScheme::full());
    CHECK(std::abs(r.statistic) <= 1e-12);
    CHECK(r.n == 5);
}

TEST_CASE("compute_statistic is permutation invariant") {
    RngStream rng(88, 5);
    std::vector<double> p(9);
    for (double& v : p) v = rng.uniform();
    const GofResult a = compute_statistic(p, StatFamily::hc2004(), TruncationScheme::full());
    std::vector<double> q(p.rbegin(), p.rend());
    std::swap(q[0], q[4]);
    const GofResult b = compute_statistic(q, StatFamily::hc2004(), TruncationScheme::full());
    CHECK(a.statistic == b.statistic);
    CHECK(a.argmax_index == b.argmax_index);
}

TEST_CASE("compute_statistic equals exhaustive maximisation over a truncation") {
    RngStream rng(3131, 6);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> p(4);
        for (double& v : p) v = 0.02 + 0.96 * rng.uniform();
        std::vector<double> sorted(p);
        std::sort(sorted.begin(), sorted.end());
        const double want = std::max(oracle::hc2004_literal(1.0 / 4, sorted[0], 4),
                                     oracle::hc2004_literal(2.0 / 4, sorted[1], 4));
        const GofResult r =
            compute_statistic(p, StatFamily::hc2004(), TruncationScheme::index_range(1, 2));
        CHECK(r.statistic == doctest::Approx(want).epsilon(1e-12));
        CHECK(r.argmax_index >= 1);
        CHECK(r.argmax_index <= 2);
    }
}

TEST_CASE("empty truncation region raises, never returns -inf") {
    const std::vector<double> p{0.4, 0.5, 0.6};
    TruncationScheme t;
    t.alpha0 = 0.0;
    t.alpha1 = 0.1;  // no p-value this small
    CHECK_THROWS_AS(compute_statistic(p, StatFamily::hc2004(), t), EmptyRegionError);
}

TEST_CASE("ties do not disturb the statistic") {
    const std::vector<double> p{0.3, 0.3, 0.3, 0.7};
    const GofResult r = compute_statistic(p, StatFamily::hc2004(), TruncationScheme::full());
    CHECK(std::isfinite(r.statistic));
    const std::vector<double> q{0.3, 0.7, 0.3, 0.3};
    CHECK(compute_statistic(q, StatFamily::hc2004(), TruncationScheme::full()).statistic ==
          r.statistic);
}

TEST_CASE("input validation") {
    std::vector<double> bad{0.2, 1.5};
    CHECK_THROWS_AS(compute_statistic(bad, StatFamily::hc2004(), TruncationScheme::full()),
                    DomainError);
    CHECK_THROWS_AS(f_eval(StatFamily::hc2004(), std::nan(""), 0.5, 10), DomainError);
    TruncationScheme t;
    t.k0 = 3;
    t.k1 = 2;
    std::vector<double> ok{0.2, 0.5, 0.7};
    CHECK_THROWS_AS(compute_statistic(ok, StatFamily::hc2004(), t), DomainError);
}

TEST_CASE("p-values at the boundary are clamped, not rejected") {
    const std::vector<double> p{0.0, 0.5, 1.0};
    const GofResult r = compute_statistic(p, StatFamily::hc2004(), TruncationScheme::full());
    CHECK(std::isfinite(r.statistic));
    CHECK(r.argmax_index == 1);  // the zero p-value dominates
}

TEST_CASE("monotone response: decreasing a p-value never decreases the statistic") {
    RngStream rng(2024, 7);
    const std::vector<StatFamily> fams{
        StatFamily::hc2004(), StatFamily::hc2008(), StatFamily::berk_jones(),
        StatFamily::reverse_berk_jones(), StatFamily::ks_plus(),
        StatFamily::bonferroni(0.05), StatFamily::fdr(0.1)};
    int done = 0;
    while (done < 1200) {
        const int n = 2 + static_cast<int>(rng.uniform_int(10));
        std::vector<double> p(n);
        for (double& v : p) v = rng.uniform();
        TruncationScheme t;
        t.k0 = 1 + static_cast<int>(rng.uniform_int(n));
        t.k1 = t.k0 + static_cast<int>(rng.uniform_int(n - t.k0 + 1));
        t.alpha1 = 0.5 + 0.5 * rng.uniform();  // alpha0 = 0: the exclusion
                                               // floor removes small p-values
                                               // from the sup by design
        const StatFamily fam = fams[rng.uniform_int(fams.size())];
        const int hit = static_cast<int>(rng.uniform_int(n));
        std::vector<double> q(p);
        q[hit] *= rng.uniform();
        double s0, s1;
        try {
            s0 = compute_statistic(p, fam, t).statistic;
            s1 = compute_statistic(q, fam, t).statistic;
        } catch (const EmptyRegionError&) {
            continue;
        }
        CHECK(s1 >= s0 - 1e-12);
        ++done;
    }
}

TEST_CASE("Bonferroni and FDR rejection semantics at b = 0") {
    RngStream rng(606, 8);
    const double alpha = 0.07;
    for (int rep = 0; rep < 400; ++rep) {
        const int n = 3 + static_cast<int>(rng.uniform_int(12));
        std::vector<double> p(n);
        for (double& v : p) v = std::pow(rng.uniform(), 2.0);  // skew small
        std::vector<double> sorted(p);
        std::sort(sorted.begin(), sorted.end());

        const double bonf =
            compute_statistic(p, StatFamily::bonferroni(alpha), TruncationScheme::full()).statistic;
        CHECK((bonf > 0.0) == (sorted.front() < alpha / n));

        const double fdr =
            compute_statistic(p, StatFamily::fdr(alpha), TruncationScheme::full()).statistic;
        bool any = false;
        for (int i = 1; i <= n; ++i) any = any || sorted[i - 1] < alpha * i / n;
        CHECK((fdr > 0.0) == any);
    }
}

TEST_CASE("rejection boundary shapes") {
    // Large b: nothing can reject.
    const std::vector<double> zero =
        rejection_boundary(StatFamily::hc2004(), TruncationScheme::full(), 8, 1e9);
    for (double u : zero) CHECK(u == 0.0);

    // FDR at b = 0: u_i = alpha * i / n.
    const std::vector<double> fdr =
        rejection_boundary(StatFamily::fdr(0.05), TruncationScheme::full(), 10, 0.0);
    for (int i = 1; i <= 10; ++i) {
        CHECK(fdr[i - 1] == doctest::Approx(0.05 * i / 10.0).epsilon(1e-12));
    }

    // Index truncation zeroes the outside.
    const std::vector<double> trunc =
        rejection_boundary(StatFamily::hc2004(), TruncationScheme::index_range(3, 6), 10, 1.0);
    for (int i = 1; i <= 10; ++i) {
        if (i < 3 || i > 6) {
            CHECK(trunc[i - 1] == 0.0);
        } else {
            CHECK(trunc[i - 1] > 0.0);
        }
    }

    // Magnitude truncation caps at alpha1 and floors below alpha0.
    TruncationScheme t;
    t.alpha0 = 0.02;
    t.alpha1 = 0.08;
    const std::vector<double> mag =
        rejection_boundary(StatFamily::fdr(0.5), t, 10, 0.0);
    for (int i = 1; i <= 10; ++i) {
        const double raw = 0.5 * i / 10.0;
        const double want = raw < 0.02 ? 0.0 : std::min(raw, 0.08);
        CHECK(mag[i - 1] == doctest::Approx(want).epsilon(1e-12));
    }
}
