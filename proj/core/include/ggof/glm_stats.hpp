#pragma once

#include <Eigen/Dense>

namespace ggof {

enum class ModelKind { Linear, Logistic };

// Regression data: response y, inquiry design x (whose coefficients are under
// test), control design z (may have zero columns; supply an intercept as a
// column of ones when wanted).
struct GlmDataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;
    Eigen::MatrixXd z;
    ModelKind model = ModelKind::Linear;
    double sigma = 1.0;          // linear-model noise scale
    bool estimate_sigma = false; // use the null-fit residual standard error
};

struct NullFit {
    Eigen::VectorXd mu0;      // fitted mean under the null (controls only)
    Eigen::VectorXd weights;  // variance weights: 1/sigma^2 or mu0(1-mu0)
    double sigma = 1.0;       // resolved noise scale (linear)
    double dispersion = 1.0;  // score scaling a(phi): sigma^2 or 1
};

// Null-model fit on the controls alone. Logistic fits by Newton iteration
// (tolerance 1e-10 on the score, at most 100 steps).
NullFit null_fit(const GlmDataset& ds);

struct FitOutput {
    Eigen::VectorXd t_j;
    Eigen::VectorXd t_m;
    Eigen::MatrixXd sigma_tj;
    Eigen::MatrixXd sigma_tm;
    Eigen::VectorXd lambda_diag;  // diagonal of the joint inverse information
    Eigen::VectorXd c_diag;       // marginal scalings 1/sqrt(conditional variance)
};

// One-step-MLE joint statistics: standardized coefficients of the full fit.
FitOutput joint_statistics(const GlmDataset& ds);

// Marginal statistics: one covariate at a time, conditional on controls.
FitOutput marginal_statistics(const GlmDataset& ds);

// De-correlated marginal statistics U_M t_m with U_M Sigma_TM U_M' = I.
Eigen::VectorXd decorrelated_statistics(const GlmDataset& ds);

// The same vector reached through the joint path: whitens t_j in the
// reversed coordinate orientation. Plain lower-Cholesky whitenings of t_j
// and t_m differ by an orthogonal rotation; the reversed orientation is the
// one under which the two de-correlations coincide.
Eigen::VectorXd decorrelated_statistics_joint(const GlmDataset& ds);

}  // namespace ggof
