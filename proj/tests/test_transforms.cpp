#include "ggof/transforms.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ggof/errors.hpp"
#include "ggof/rng.hpp"
#include "ggof/simulation.hpp"
#include "oracles.hpp"

using namespace ggof;

namespace {

Eigen::MatrixXd random_correlation(int n, RngStream& rng) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    Eigen::MatrixXd s = a * a.transpose() + 0.5 * n * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd d = s.diagonal().array().sqrt().inverse();
    Eigen::MatrixXd c = d.asDiagonal() * s * d.asDiagonal();
    for (int i = 0; i < n; ++i) c(i, i) = 1.0;
    return c;
}

// Polynomial-decay matrix used in the transform studies: 1/(1+|i-j|).
// (The literal |i-j|^{-1} form makes adjacent coordinates perfectly
// correlated and hence is singular; the decay-with-offset form is the
// usable reading.)
Eigen::MatrixXd inverse_distance_matrix(int n) {
    return gen_correlation(CorrelationSpec::poly_decay(n, 1.0));
}

}  // namespace

TEST_CASE("identity correlation: transforms are the identity map") {
    const int n = 6;
    GaussianStatVector v;
    v.t = Eigen::VectorXd::LinSpaced(n, -1.0, 1.5);
    v.sigma = Eigen::MatrixXd::Identity(n, n);
    CHECK((decorrelate(v).t - v.t).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((innovate(v).t - v.t).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("2x2 de-correlation closed form") {
    const double rho = 0.6;
    Eigen::MatrixXd sigma(2, 2);
    sigma << 1.0, rho, rho, 1.0;
    const Eigen::MatrixXd u = transform_matrix(sigma, TransformKind::dt());
    CHECK(u(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(u(1, 0) == doctest::Approx(-rho / std::sqrt(1 - rho * rho)).epsilon(1e-12));
    CHECK(u(1, 1) == doctest::Approx(1.0 / std::sqrt(1 - rho * rho)).epsilon(1e-12));
    CHECK((u * sigma * u.transpose() - Eigen::MatrixXd::Identity(2, 2))
              .lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("decorrelate whitens: U Sigma U' = I and empirical covariance is flat") {
    RngStream rng(41, 1);
    const int n = 10;
    const Eigen::MatrixXd sigma = random_correlation(n, rng);
    const Eigen::MatrixXd u = transform_matrix(sigma, TransformKind::dt());
    CHECK((u * sigma * u.transpose() - Eigen::MatrixXd::Identity(n, n))
              .lpNorm<Eigen::Infinity>() <= 1e-10);

    const MvnSampler sampler(sigma);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    const int reps = 100000;
    RngStream draw_rng(42, 2);
    for (int rep = 0; rep < reps; ++rep) {
        const Eigen::VectorXd y = u * sampler.draw(draw_rng);
        cov += y * y.transpose();
    }
    cov /= reps;
    CHECK((cov - Eigen::MatrixXd::Identity(n, n)).lpNorm<Eigen::Infinity>() <= 0.02);
}

TEST_CASE("innovate: unit output diagonal and signal amplification") {
    RngStream rng(43, 3);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 3 + static_cast<int>(rng.uniform_int(8));
        const Eigen::MatrixXd sigma = random_correlation(n, rng);
        const Eigen::MatrixXd m_it = transform_matrix(sigma, TransformKind::it());
        const Eigen::MatrixXd out = m_it * sigma * m_it.transpose();
        for (int i = 0; i < n; ++i) CHECK(out(i, i) == doctest::Approx(1.0).epsilon(1e-12));

        // Single signal A at j: transformed mean is A*sqrt((Sigma^-1)_jj),
        // checked against Eigen's own inverse as the oracle.
        const Eigen::MatrixXd prec = sigma.inverse();
        const int j = static_cast<int>(rng.uniform_int(n));
        const double amp = 1.0 + rng.uniform();
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
        mu(j) = amp;
        const Eigen::VectorXd snr = m_it * mu;
        CHECK(snr(j) == doctest::Approx(amp * std::sqrt(prec(j, j))).epsilon(1e-8));
        CHECK(snr(j) >= amp - 1e-9);
    }
}

TEST_CASE("innovate inverts: D Sigma^-1 composed with Sigma D^-1 is the identity") {
    RngStream rng(44, 4);
    const int n = 7;
    const Eigen::MatrixXd sigma = random_correlation(n, rng);
    const Eigen::MatrixXd m_it = transform_matrix(sigma, TransformKind::it());
    const Eigen::MatrixXd prec = sigma.inverse();
    Eigen::VectorXd d = prec.diagonal().array().sqrt().inverse();
    const Eigen::MatrixXd back = sigma * d.asDiagonal().inverse();
    CHECK((m_it * back - Eigen::MatrixXd::Identity(n, n)).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("equal-correlation precision diagonal matches the rank-one-update oracle") {
    for (int n : {5, 12, 40}) {
        for (double rho : {0.1, 0.4, 0.8}) {
            const Eigen::MatrixXd sigma = gen_correlation(CorrelationSpec::equal(n, rho));
            const Eigen::MatrixXd u = transform_matrix(sigma, TransformKind::dt());
            const Eigen::MatrixXd prec = u.transpose() * u;
            for (int j = 0; j < n; ++j) {
                CHECK(prec(j, j) ==
                      doctest::Approx(oracle::equal_corr_precision_diag(n, rho)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("banded transform endpoints: b_n=1 is DT, b_n=n is IT") {
    RngStream rng(45, 5);
    const int n = 9;
    const Eigen::MatrixXd sigma = random_correlation(n, rng);
    const Eigen::MatrixXd v1 = transform_matrix(sigma, TransformKind::banded(1));
    const Eigen::MatrixXd u = transform_matrix(sigma, TransformKind::dt());
    CHECK((v1 - u).lpNorm<Eigen::Infinity>() <= 1e-10);

    const Eigen::MatrixXd vn = transform_matrix(sigma, TransformKind::banded(n));
    const Eigen::MatrixXd it = transform_matrix(sigma, TransformKind::it());
    CHECK((vn - it).lpNorm<Eigen::Infinity>() <= 1e-10);

    GaussianStatVector g;
    g.t = Eigen::VectorXd::Ones(n);
    g.mu = Eigen::VectorXd::Zero(n);
    (*g.mu)(2) = 2.0;
    g.sigma = sigma;
    CHECK((banded_transform(g, n).t - innovate(g).t).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK((*banded_transform(g, 1).mu - *decorrelate(g).mu).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("banded transform rows match an independently factorized construction") {
    const int n = 12;
    const Eigen::MatrixXd sigma = inverse_distance_matrix(n);
    // Oracle route: Eigen's LLT for U = Q^-1, literal partial sums.
    const Eigen::MatrixXd q = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
    const Eigen::MatrixXd u =
        q.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
    for (int b_n : {1, 3, 7, n}) {
        Eigen::MatrixXd want = Eigen::MatrixXd::Zero(n, n);
        for (int j = 0; j < n; ++j) {
            for (int k = j; k <= std::min(n - 1, j + b_n - 1); ++k) {
                want.row(j) += u(k, j) * u.row(k);
            }
            want.row(j) /= std::sqrt(want.row(j) * sigma * want.row(j).transpose());
        }
        const Eigen::MatrixXd got = transform_matrix(sigma, TransformKind::banded(b_n));
        CHECK((got - want).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
}

TEST_CASE("banded max SNR rises from DT to the IT plateau for spread signals") {
    const int n = 50;
    const Eigen::MatrixXd sigma = inverse_distance_matrix(n);
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    mu(15) = mu(31) = mu(47) = 1.0;  // positions 16, 32, 48

    double prev = 0.0;
    double last = 0.0;
    for (int b_n = 1; b_n <= n; ++b_n) {
        const double m = snr_report(mu, sigma, TransformKind::banded(b_n)).max_snr;
        CHECK(m >= prev - 5e-3);  // nondecreasing up to numerical ripple
        prev = std::max(prev, m);
        last = m;
    }
    const double it = snr_report(mu, sigma, TransformKind::it()).max_snr;
    CHECK(last == doctest::Approx(it).epsilon(1e-10));
    CHECK(it >= snr_report(mu, sigma, TransformKind::dt()).max_snr - 1e-12);
}

TEST_CASE("snr_report basics and the DT/IT ordering for a single signal") {
    const int n = 8;
    RngStream rng(46, 6);
    const Eigen::MatrixXd sigma = random_correlation(n, rng);
    const SnrReport zero = snr_report(Eigen::VectorXd::Zero(n), sigma, TransformKind::it());
    CHECK(zero.max_snr == 0.0);

    for (int rep = 0; rep < 100; ++rep) {
        const int m = 3 + static_cast<int>(rng.uniform_int(8));
        const Eigen::MatrixXd s = random_correlation(m, rng);
        const int j = static_cast<int>(rng.uniform_int(m));
        const double amp = 0.5 + rng.uniform();
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(m);
        mu(j) = amp;
        const double it_at_j = std::abs(snr_report(mu, s, TransformKind::it()).snr(j));
        const double dt_at_j = std::abs(snr_report(mu, s, TransformKind::dt()).snr(j));
        CHECK(it_at_j >= dt_at_j - 1e-10);
        CHECK(dt_at_j >= amp - 1e-10);
    }
}

TEST_CASE("spread signals: IT beats DT at the signal positions") {
    const int n = 50;
    const Eigen::MatrixXd sigma = inverse_distance_matrix(n);
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    mu(15) = mu(31) = mu(47) = 1.0;
    const SnrReport it = snr_report(mu, sigma, TransformKind::it());
    const SnrReport dt = snr_report(mu, sigma, TransformKind::dt());
    for (int j : {15, 31, 47}) {
        CHECK(std::abs(it.snr(j)) > std::abs(dt.snr(j)));
    }
}

TEST_CASE("bivariate SNR formulas") {
    const BivariateSnrs v = bivariate_snrs(-1.0, 1.0, 0.5);
    CHECK(v.marginal2 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(v.joint2 == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
    CHECK(v.summation == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(v.joint2 > v.marginal2);
    CHECK(v.marginal2 > v.summation);

    // Sparse case a = 0: the marginal SNR dominates.
    RngStream rng(47, 7);
    for (int rep = 0; rep < 200; ++rep) {
        const double b = 0.1 + 2.0 * rng.uniform();
        const double rho = -0.99 + 1.98 * rng.uniform();
        const BivariateSnrs s = bivariate_snrs(0.0, b, rho);
        CHECK(s.marginal2 == doctest::Approx(b).epsilon(1e-14));
        CHECK(s.marginal2 >= s.joint2 - 1e-12);
        CHECK(s.marginal2 >= s.summation - 1e-12);
    }

    // Equal signals a = b: summation dominates for every rho.
    for (int rep = 0; rep < 200; ++rep) {
        const double b = 0.1 + 2.0 * rng.uniform();
        const double rho = -0.99 + 1.98 * rng.uniform();
        const BivariateSnrs s = bivariate_snrs(b, b, rho);
        CHECK(s.summation >= s.marginal2 - 1e-12);
        CHECK(s.summation >= s.joint2 - 1e-12);
    }
}

TEST_CASE("detection boundary values and monotonicity") {
    CHECK(detection_boundary(0.6) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(detection_boundary(0.75) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(detection_boundary(0.75 + 1e-12) == doctest::Approx(0.25).epsilon(1e-5));
    CHECK(detection_boundary(0.96) == doctest::Approx(0.64).epsilon(1e-12));
    double prev = 0.0;
    for (int k = 1; k < 100; ++k) {
        const double a = 0.5 + 0.5 * k / 100.0;
        const double r = detection_boundary(a);
        CHECK(r > prev);
        prev = r;
    }
    CHECK_THROWS_AS(detection_boundary(0.5), DomainError);
    CHECK_THROWS_AS(detection_boundary(1.0), DomainError);
    CHECK(detection_boundary_glm(0.96, 2.0) == doctest::Approx(0.32).epsilon(1e-12));
    CHECK_THROWS_AS(detection_boundary_glm(0.8, 0.0), DomainError);
}

TEST_CASE("near-singular correlation is rejected with the pivot named") {
    Eigen::MatrixXd sigma(3, 3);
    sigma << 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0;
    try {
        cholesky_lower(sigma);
        FAIL("expected SingularMatrixError");
    } catch (const SingularMatrixError& e) {
        CHECK(e.pivot == 1);
    }
}
