#pragma once

#include <Eigen/Dense>
#include <optional>

namespace ggof {

// Gaussian statistic vector with an optional known mean (for SNR studies)
// and a unit-diagonal correlation matrix.
struct GaussianStatVector {
    Eigen::VectorXd t;
    std::optional<Eigen::VectorXd> mu;
    Eigen::MatrixXd sigma;
};

struct TransformKind {
    enum class Tag { Dt, It, Banded };
    Tag tag = Tag::It;
    int band = 1;  // b_n for Banded

    static TransformKind dt() { return {Tag::Dt, 1}; }
    static TransformKind it() { return {Tag::It, 0}; }
    static TransformKind banded(int b_n) { return {Tag::Banded, b_n}; }
};

// Lower Cholesky factor with explicit pivot reporting; tolerance is
// 1e-12 * max diagonal. Near-singular input is rejected, never regularized.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& sigma);

// The transform matrix V with V*t the transformed statistics:
//   dt:     U = Q^{-1} (inverse Cholesky factor), V Sigma V' = I
//   it:     D Sigma^{-1} with D = diag(1/sqrt((Sigma^{-1})_ii))
//   banded: partial Cholesky sums interpolating dt (b_n=1) to it (b_n=n),
//           rows rescaled to unit output variance
Eigen::MatrixXd transform_matrix(const Eigen::MatrixXd& sigma, TransformKind kind);

GaussianStatVector decorrelate(const GaussianStatVector& v);
GaussianStatVector innovate(const GaussianStatVector& v);
GaussianStatVector banded_transform(const GaussianStatVector& v, int b_n);

struct SnrReport {
    Eigen::VectorXd snr;
    double max_snr = 0.0;  // max absolute transformed mean
    int argmax = 0;        // 1-based position
};

SnrReport snr_report(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                     TransformKind kind);

// SNRs of the three bivariate strategies at scaled effects (a, b) and data
// correlation rho: marginal second coordinate, joint second coordinate, and
// the rescaled sum (identical under both fits).
struct BivariateSnrs {
    double marginal2;
    double joint2;
    double summation;
};

BivariateSnrs bivariate_snrs(double a, double b, double rho);

// Sparse-signal detection boundary: alpha - 1/2 on (1/2, 3/4],
// (1 - sqrt(1-alpha))^2 on (3/4, 1).
double detection_boundary(double alpha);

// Regression version, scaled by the conditional variance quadratic form.
double detection_boundary_glm(double alpha, double xj_quadratic_form);

}  // namespace ggof
