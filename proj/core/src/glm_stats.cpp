#include "ggof/glm_stats.hpp"

#include <cmath>

#include "ggof/errors.hpp"
#include "ggof/transforms.hpp"

namespace ggof {

namespace {

void check_dims(const GlmDataset& ds) {
    const auto n_obs = ds.y.size();
    if (ds.x.rows() != n_obs) throw DimensionError("x row count does not match y");
    if (ds.z.size() != 0 && ds.z.rows() != n_obs) {
        throw DimensionError("z row count does not match y");
    }
    if (ds.x.cols() < 1) throw DimensionError("x needs at least one column");
}

Eigen::VectorXd logistic(const Eigen::VectorXd& eta) {
    return (1.0 + (-eta.array()).exp()).inverse().matrix();
}

// Workspace shared by the joint and marginal paths:
//   info  = X~'(I-H~)X~ (conditional information of the inquiry block)
//   score = X'(y - mu0) / a(phi)
struct Prepared {
    Eigen::MatrixXd info;
    Eigen::VectorXd score;
};

Prepared prepare(const GlmDataset& ds, const NullFit& fit) {
    const Eigen::ArrayXd sw = fit.weights.array().sqrt();
    Eigen::MatrixXd xt = sw.matrix().asDiagonal() * ds.x;
    if (ds.z.size() != 0 && ds.z.cols() > 0) {
        const Eigen::MatrixXd zt = sw.matrix().asDiagonal() * ds.z;
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(zt);
        // Residualize the inquiry block against the weighted controls.
        xt -= zt * qr.solve(xt);
    }
    Prepared out;
    out.info = xt.transpose() * xt;
    out.score = ds.x.transpose() * (ds.y - fit.mu0) / fit.dispersion;
    return out;
}

}  // namespace

NullFit null_fit(const GlmDataset& ds) {
    check_dims(ds);
    const auto n_obs = ds.y.size();
    const auto m = ds.z.size() == 0 ? 0 : ds.z.cols();
    NullFit fit;

    if (ds.model == ModelKind::Linear) {
        if (m == 0) {
            fit.mu0 = Eigen::VectorXd::Zero(n_obs);
        } else {
            const Eigen::HouseholderQR<Eigen::MatrixXd> qr(ds.z);
            fit.mu0 = ds.z * qr.solve(ds.y);
        }
        double sigma = ds.sigma;
        if (ds.estimate_sigma) {
            const auto dof = n_obs - m;
            if (dof < 1) throw DomainError("not enough observations to estimate sigma");
            sigma = std::sqrt((ds.y - fit.mu0).squaredNorm() / dof);
        }
        if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
        fit.sigma = sigma;
        fit.dispersion = sigma * sigma;
        fit.weights = Eigen::VectorXd::Constant(n_obs, 1.0 / (sigma * sigma));
        return fit;
    }

    // Logistic: Newton iterations of y on z alone.
    for (auto k = 0; k < n_obs; ++k) {
        if (ds.y(k) < 0.0 || ds.y(k) > 1.0) {
            throw DomainError("logistic responses must lie in [0,1]");
        }
    }
    if (m == 0) {
        fit.mu0 = Eigen::VectorXd::Constant(n_obs, 0.5);
        fit.weights = Eigen::VectorXd::Constant(n_obs, 0.25);
        fit.dispersion = 1.0;
        return fit;
    }
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(m);
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
        const Eigen::VectorXd mu = logistic(ds.z * gamma);
        const Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
        const Eigen::VectorXd score = ds.z.transpose() * (ds.y - mu);
        if (score.lpNorm<Eigen::Infinity>() < 1e-10) {
            converged = true;
            break;
        }
        if (w.minCoeff() < 1e-12) {
            throw ConvergenceError("logistic null fit ran into separation "
                                   "(fitted probabilities at 0 or 1)");
        }
        const Eigen::MatrixXd zw = w.array().sqrt().matrix().asDiagonal() * ds.z;
        const Eigen::MatrixXd info = zw.transpose() * zw;
        gamma += info.ldlt().solve(score);
    }
    if (!converged) {
        throw ConvergenceError("logistic null fit did not converge in 100 iterations");
    }
    fit.mu0 = logistic(ds.z * gamma);
    fit.weights = fit.mu0.array() * (1.0 - fit.mu0.array());
    fit.dispersion = 1.0;
    return fit;
}

FitOutput joint_statistics(const GlmDataset& ds) {
    const NullFit fit = null_fit(ds);
    const Prepared prep = prepare(ds, fit);
    const int n = static_cast<int>(ds.x.cols());

    Eigen::MatrixXd info_inv;
    try {
        const Eigen::MatrixXd q = cholesky_lower(prep.info);
        const Eigen::MatrixXd u =
            q.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
        info_inv = u.transpose() * u;
    } catch (const SingularMatrixError& e) {
        throw SingularMatrixError(
            "joint fit is rank deficient: inquiry column " + std::to_string(e.pivot) +
            " is linearly dependent given the controls", e.pivot);
    }

    FitOutput out;
    out.lambda_diag = info_inv.diagonal();
    const Eigen::VectorXd lam_scale = out.lambda_diag.array().sqrt().inverse();
    const Eigen::VectorXd beta = info_inv * prep.score;
    out.t_j = lam_scale.asDiagonal() * beta;
    out.sigma_tj = lam_scale.asDiagonal() * info_inv * lam_scale.asDiagonal();
    for (int i = 0; i < n; ++i) out.sigma_tj(i, i) = 1.0;
    return out;
}

FitOutput marginal_statistics(const GlmDataset& ds) {
    const NullFit fit = null_fit(ds);
    const Prepared prep = prepare(ds, fit);
    const int n = static_cast<int>(ds.x.cols());

    FitOutput out;
    out.c_diag.resize(n);
    for (int j = 0; j < n; ++j) {
        const double v = prep.info(j, j);
        if (!(v > 0.0)) {
            throw DomainError("inquiry column " + std::to_string(j) +
                              " has zero conditional variance");
        }
        out.c_diag(j) = 1.0 / std::sqrt(v);
    }
    out.t_m = out.c_diag.asDiagonal() * prep.score;
    out.sigma_tm = out.c_diag.asDiagonal() * prep.info * out.c_diag.asDiagonal();
    for (int i = 0; i < n; ++i) out.sigma_tm(i, i) = 1.0;
    return out;
}

Eigen::VectorXd decorrelated_statistics(const GlmDataset& ds) {
    const FitOutput marg = marginal_statistics(ds);
    const int n = static_cast<int>(marg.t_m.size());
    const Eigen::MatrixXd q = cholesky_lower(marg.sigma_tm);
    return q.triangularView<Eigen::Lower>().solve(
        Eigen::MatrixXd::Identity(n, n)) * marg.t_m;
}

Eigen::VectorXd decorrelated_statistics_joint(const GlmDataset& ds) {
    const FitOutput joint = joint_statistics(ds);
    const Eigen::MatrixXd rev_sigma = joint.sigma_tj.reverse();
    const Eigen::VectorXd rev_t = joint.t_j.reverse();
    const Eigen::MatrixXd q = cholesky_lower(rev_sigma);
    const Eigen::VectorXd w = q.triangularView<Eigen::Lower>().solve(rev_t);
    return w.reverse();
}

}  // namespace ggof
