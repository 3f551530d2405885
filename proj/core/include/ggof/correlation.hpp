#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ggof {

// Dependence structure of the input statistics: identity, equal-correlation,
// Toeplitz (one value per off-diagonal), or a full correlation matrix.
class CorrelationModel {
public:
    enum class Kind { Identity, Equal, Toeplitz, General };

    static CorrelationModel identity(int n);
    static CorrelationModel equal(int n, double rho);
    static CorrelationModel toeplitz(std::vector<double> rho_by_lag);  // n-1 lags
    static CorrelationModel general(Eigen::MatrixXd sigma);

    Kind kind() const { return kind_; }
    int n() const { return n_; }
    double rho() const { return rho_; }
    const std::vector<double>& lags() const { return lags_; }
    const Eigen::MatrixXd& matrix() const { return sigma_; }

    // Mean of the j-th off-diagonal (j in 1..n-1); exact value for
    // equal/toeplitz kinds.
    double off_diagonal_mean(int lag) const;

    // Single element without materializing the matrix.
    double entry(int i, int j) const;

    // Materialize as a dense matrix (identity/equal/toeplitz included).
    Eigen::MatrixXd dense() const;

    // Unit diagonal, symmetry and positive-definiteness checks; throws
    // NotPositiveDefiniteError or DomainError. General matrices are checked
    // by attempted factorization.
    void validate() const;

private:
    Kind kind_ = Kind::Identity;
    int n_ = 0;
    double rho_ = 0.0;
    std::vector<double> lags_;
    Eigen::MatrixXd sigma_;
};

}  // namespace ggof
