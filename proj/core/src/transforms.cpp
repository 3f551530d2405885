#include "ggof/transforms.hpp"

#include <cmath>

#include "ggof/errors.hpp"

namespace ggof {

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& sigma) {
    const int n = static_cast<int>(sigma.rows());
    if (sigma.cols() != n) throw DimensionError("matrix must be square");
    const double tol = 1e-12 * sigma.diagonal().maxCoeff();
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        double d = sigma(j, j);
        for (int k = 0; k < j; ++k) d -= q(j, k) * q(j, k);
        if (!(d > tol)) {
            throw SingularMatrixError(
                "matrix is not positive definite at pivot " + std::to_string(j), j);
        }
        q(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = sigma(i, j);
            for (int k = 0; k < j; ++k) s -= q(i, k) * q(j, k);
            q(i, j) = s / q(j, j);
        }
    }
    return q;
}

namespace {

// U = Q^{-1}, lower triangular.
Eigen::MatrixXd inverse_cholesky(const Eigen::MatrixXd& sigma) {
    const Eigen::MatrixXd q = cholesky_lower(sigma);
    const int n = static_cast<int>(sigma.rows());
    return q.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

Eigen::MatrixXd transform_matrix(const Eigen::MatrixXd& sigma, TransformKind kind) {
    const int n = static_cast<int>(sigma.rows());
    switch (kind.tag) {
        case TransformKind::Tag::Dt:
            return inverse_cholesky(sigma);
        case TransformKind::Tag::It: {
            const Eigen::MatrixXd u = inverse_cholesky(sigma);
            const Eigen::MatrixXd prec = u.transpose() * u;  // Sigma^{-1} = U'U
            Eigen::VectorXd d = prec.diagonal().array().sqrt().inverse();
            return d.asDiagonal() * prec;
        }
        case TransformKind::Tag::Banded: {
            const int b_n = kind.band;
            if (b_n < 1 || b_n > n) throw DomainError("band width must lie in [1, n]");
            const Eigen::MatrixXd u = inverse_cholesky(sigma);
            // Row j accumulates U_{kj} * U_{k,.} for k = j .. min(n, j+b_n-1);
            // the full sum is Sigma^{-1}, a single term is U's row scaled.
            Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
            for (int j = 0; j < n; ++j) {
                const int kmax = std::min(n - 1, j + b_n - 1);
                for (int k = j; k <= kmax; ++k) {
                    v.row(j) += u(k, j) * u.row(k);
                }
            }
            // Rescale rows to unit output variance.
            for (int j = 0; j < n; ++j) {
                const double var = v.row(j) * sigma * v.row(j).transpose();
                if (!(var > 0.0)) {
                    throw SingularMatrixError(
                        "banded transform row " + std::to_string(j) + " has zero variance", j);
                }
                v.row(j) /= std::sqrt(var);
            }
            return v;
        }
    }
    throw DomainError("unknown transform kind");
}

namespace {

GaussianStatVector apply(const GaussianStatVector& v, const Eigen::MatrixXd& m) {
    if (v.sigma.rows() != v.t.size()) {
        throw DimensionError("statistic vector and correlation matrix disagree");
    }
    GaussianStatVector out;
    out.t = m * v.t;
    if (v.mu) out.mu = m * (*v.mu);
    out.sigma = m * v.sigma * m.transpose();
    // Tidy the unit diagonal; products drift at the last ulp.
    for (int i = 0; i < out.sigma.rows(); ++i) out.sigma(i, i) = 1.0;
    return out;
}

}  // namespace

GaussianStatVector decorrelate(const GaussianStatVector& v) {
    GaussianStatVector out = apply(v, transform_matrix(v.sigma, TransformKind::dt()));
    out.sigma = Eigen::MatrixXd::Identity(v.t.size(), v.t.size());
    return out;
}

GaussianStatVector innovate(const GaussianStatVector& v) {
    return apply(v, transform_matrix(v.sigma, TransformKind::it()));
}

GaussianStatVector banded_transform(const GaussianStatVector& v, int b_n) {
    return apply(v, transform_matrix(v.sigma, TransformKind::banded(b_n)));
}

SnrReport snr_report(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                     TransformKind kind) {
    if (sigma.rows() != mu.size()) {
        throw DimensionError("mean vector and correlation matrix disagree");
    }
    SnrReport report;
    report.snr = transform_matrix(sigma, kind) * mu;
    report.max_snr = 0.0;
    report.argmax = 1;
    for (int i = 0; i < report.snr.size(); ++i) {
        if (std::abs(report.snr(i)) > report.max_snr) {
            report.max_snr = std::abs(report.snr(i));
            report.argmax = i + 1;
        }
    }
    return report;
}

BivariateSnrs bivariate_snrs(double a, double b, double rho) {
    if (!(rho > -1.0 && rho < 1.0)) throw DomainError("rho must lie in (-1, 1)");
    BivariateSnrs out;
    out.marginal2 = rho * a + b;
    out.joint2 = b * std::sqrt(1.0 - rho * rho);
    out.summation = (a + b) * std::sqrt((1.0 + rho) / 2.0);
    return out;
}

double detection_boundary(double alpha) {
    if (!(alpha > 0.5 && alpha < 1.0)) {
        throw DomainError("detection boundary is defined for alpha in (1/2, 1)");
    }
    if (alpha <= 0.75) return alpha - 0.5;
    const double r = 1.0 - std::sqrt(1.0 - alpha);
    return r * r;
}

double detection_boundary_glm(double alpha, double xj_quadratic_form) {
    if (!(xj_quadratic_form > 0.0)) {
        throw DomainError("conditional variance quadratic form must be positive");
    }
    return detection_boundary(alpha) / xj_quadratic_form;
}

}  // namespace ggof
