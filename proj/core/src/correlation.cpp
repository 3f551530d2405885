#include "ggof/correlation.hpp"

#include <cmath>

#include "ggof/errors.hpp"

namespace ggof {

CorrelationModel CorrelationModel::identity(int n) {
    CorrelationModel m;
    m.kind_ = Kind::Identity;
    m.n_ = n;
    return m;
}

CorrelationModel CorrelationModel::equal(int n, double rho) {
    CorrelationModel m;
    m.kind_ = Kind::Equal;
    m.n_ = n;
    m.rho_ = rho;
    return m;
}

CorrelationModel CorrelationModel::toeplitz(std::vector<double> rho_by_lag) {
    CorrelationModel m;
    m.kind_ = Kind::Toeplitz;
    m.n_ = static_cast<int>(rho_by_lag.size()) + 1;
    m.lags_ = std::move(rho_by_lag);
    return m;
}

CorrelationModel CorrelationModel::general(Eigen::MatrixXd sigma) {
    CorrelationModel m;
    m.kind_ = Kind::General;
    m.n_ = static_cast<int>(sigma.rows());
    m.sigma_ = std::move(sigma);
    return m;
}

double CorrelationModel::off_diagonal_mean(int lag) const {
    if (lag < 1 || lag >= n_) throw DomainError("off-diagonal lag out of range");
    switch (kind_) {
        case Kind::Identity:
            return 0.0;
        case Kind::Equal:
            return rho_;
        case Kind::Toeplitz:
            return lags_[lag - 1];
        case Kind::General: {
            double sum = 0.0;
            for (int i = 0; i + lag < n_; ++i) sum += sigma_(i, i + lag);
            return sum / (n_ - lag);
        }
    }
    return 0.0;
}

double CorrelationModel::entry(int i, int j) const {
    if (i == j) return 1.0;
    switch (kind_) {
        case Kind::Identity:
            return 0.0;
        case Kind::Equal:
            return rho_;
        case Kind::Toeplitz:
            return lags_[std::abs(i - j) - 1];
        case Kind::General:
            return sigma_(i, j);
    }
    return 0.0;
}

Eigen::MatrixXd CorrelationModel::dense() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(n_, n_);
    switch (kind_) {
        case Kind::Identity:
            break;
        case Kind::Equal:
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    if (i != j) out(i, j) = rho_;
            break;
        case Kind::Toeplitz:
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    if (i != j) out(i, j) = lags_[std::abs(i - j) - 1];
            break;
        case Kind::General:
            out = sigma_;
            break;
    }
    return out;
}

void CorrelationModel::validate() const {
    if (n_ < 1) throw DomainError("correlation model needs n >= 1");
    switch (kind_) {
        case Kind::Identity:
            return;
        case Kind::Equal: {
            const double lower = n_ > 1 ? -1.0 / (n_ - 1) : -1.0;
            if (!(rho_ > lower && rho_ < 1.0)) {
                throw DomainError("equal correlation must lie in (-1/(n-1), 1)");
            }
            return;
        }
        case Kind::Toeplitz:
        case Kind::General: {
            Eigen::MatrixXd sigma = dense();
            for (int i = 0; i < n_; ++i) {
                if (std::abs(sigma(i, i) - 1.0) > 1e-10) {
                    throw DomainError("correlation matrix diagonal must be 1");
                }
            }
            if (!sigma.isApprox(sigma.transpose(), 1e-10)) {
                throw DomainError("correlation matrix must be symmetric");
            }
            Eigen::LLT<Eigen::MatrixXd> llt(sigma);
            if (llt.info() != Eigen::Success) {
                const double min_ev =
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma)
                        .eigenvalues()
                        .minCoeff();
                throw NotPositiveDefiniteError(
                    "correlation matrix is not positive semidefinite "
                    "(min eigenvalue " + std::to_string(min_ev) + ")",
                    min_ev);
            }
            return;
        }
    }
}

}  // namespace ggof
