#include "ggof/cross_prob.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "ggof/errors.hpp"
#include "ggof/rng.hpp"
#include "oracles.hpp"

using namespace ggof;

TEST_CASE("vacuous and single-constraint boundaries") {
    CHECK(cross_prob_iid(BoundaryVector::full({0, 0, 0, 0, 0})).value == 1.0);
    CHECK(cross_prob_iid(BoundaryVector::full({0.2, 0, 0, 0, 0})).value ==
          doctest::Approx(std::pow(0.8, 5)).epsilon(1e-12));
    CHECK(cross_prob_iid(BoundaryVector::full({0.37})).value ==
          doctest::Approx(0.63).epsilon(1e-12));
}

TEST_CASE("n=3 worked example against direct integration") {
    // Recorded from the nested-integration oracle before the recursion was
    // built: P(U_(1)>0.1, U_(2)>0.2, U_(3)>0.3) = 0.700 exactly.
    const std::vector<double> c{0.1, 0.2, 0.3};
    CHECK(oracle::cross_prob_exact(c) == doctest::Approx(0.700).epsilon(1e-12));
    CHECK(oracle::cross_prob_simpson3(0.1, 0.2, 0.3) == doctest::Approx(0.700).epsilon(1e-6));
    CHECK(cross_prob_iid(BoundaryVector::full(c)).value ==
          doctest::Approx(0.700).epsilon(1e-12));
}

TEST_CASE("randomized boundaries agree with the integration oracle for n <= 5") {
    RngStream rng(160920, 1);
    for (int rep = 0; rep < 220; ++rep) {
        const int n = 1 + static_cast<int>(rng.uniform_int(5));
        std::vector<double> c(n);
        for (double& v : c) {
            const double kind = rng.uniform();
            if (kind < 0.2) {
                v = 0.0;
            } else {
                v = rng.uniform() * 0.95;
            }
        }
        const double want = oracle::cross_prob_exact(c);
        const double got = cross_prob_iid(BoundaryVector::full(c)).value;
        CHECK(std::abs(got - want) <= 1e-7);
    }
}

TEST_CASE("linear boundaries have the classical closed form 1 - theta") {
    // P(U_(i) > theta*i/n for all i) = 1 - theta, any n.
    for (int n : {5, 50, 500, 2000}) {
        for (double theta : {0.1, 0.5, 0.9}) {
            std::vector<double> c(n);
            for (int i = 1; i <= n; ++i) c[i - 1] = theta * i / n;
            CHECK(cross_prob_iid(BoundaryVector::full(c)).value ==
                  doctest::Approx(1.0 - theta).epsilon(1e-9));
        }
    }
}

TEST_CASE("stable at n = 10000") {
    const int n = 10000;
    std::vector<double> c(n);
    for (int i = 1; i <= n; ++i) c[i - 1] = 0.5 * i / n;
    const CrossProb p = cross_prob_iid(BoundaryVector::full(c));
    CHECK(p.value == doctest::Approx(0.5).epsilon(1e-8));
    CHECK_FALSE(p.underflow);
}

TEST_CASE("raising a boundary entry never increases the probability") {
    RngStream rng(7, 2);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(6));
        std::vector<double> c(n);
        for (double& v : c) v = rng.uniform() * 0.8;
        const double base = cross_prob_iid(BoundaryVector::full(c)).value;
        std::vector<double> raised(c);
        const int hit = static_cast<int>(rng.uniform_int(n));
        raised[hit] = raised[hit] + (1.0 - raised[hit]) * rng.uniform();
        const double after = cross_prob_iid(BoundaryVector::full(raised)).value;
        CHECK(after <= base + 1e-12);
    }
}

TEST_CASE("monotonization is a no-op on the result") {
    RngStream rng(11, 3);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 3 + static_cast<int>(rng.uniform_int(5));
        std::vector<double> c(n);
        for (double& v : c) v = rng.uniform() * 0.9;
        std::vector<double> mono(c);
        for (int i = 1; i < n; ++i) mono[i] = std::max(mono[i], mono[i - 1]);
        CHECK(cross_prob_iid(BoundaryVector::full(c)).value ==
              cross_prob_iid(BoundaryVector::full(mono)).value);
    }
}

TEST_CASE("interior zeros (non-adjacent support) match the oracle") {
    const std::vector<double> c{0.1, 0.0, 0.0, 0.25, 0.0};
    CHECK(cross_prob_iid(BoundaryVector::full(c)).value ==
          doctest::Approx(oracle::cross_prob_exact(c)).epsilon(1e-12));
}

TEST_CASE("boundary entries at or above one give probability zero") {
    CHECK(cross_prob_iid(BoundaryVector::full({0.2, 1.0, 0.0})).value == 0.0);
    std::vector<double> bad{0.2, std::nan(""), 0.0};
    CHECK_THROWS_AS(cross_prob_iid(BoundaryVector::full(bad)), DomainError);
}

TEST_CASE("probabilities below 1e-300 report underflow") {
    std::vector<double> c(100, 0.9995);
    const CrossProb p = cross_prob_iid(BoundaryVector::full(c));
    CHECK(p.value == 0.0);
    CHECK(p.underflow);
}

TEST_CASE("monte carlo estimator") {
    const BoundaryVector single = BoundaryVector::full({0.2, 0, 0, 0, 0});
    const McEstimate est = cross_prob_mc(single, 1000000, 2026);
    CHECK(std::abs(est.estimate - 0.32768) <= 4.0 * est.std_error);

    const McEstimate sure = cross_prob_mc(BoundaryVector::full({0, 0, 0}), 5000, 1);
    CHECK(sure.estimate == 1.0);

    // Deterministic for a fixed seed.
    const BoundaryVector c = BoundaryVector::full({0.1, 0.2, 0.3});
    CHECK(cross_prob_mc(c, 20000, 99).estimate == cross_prob_mc(c, 20000, 99).estimate);

    // Agreement with the exact recursion.
    const McEstimate mc = cross_prob_mc(c, 200000, 7);
    const double exact = cross_prob_iid(c).value;
    CHECK(std::abs(mc.estimate - exact) <= 4.0 * mc.std_error);
}
