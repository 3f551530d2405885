#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ggof/correlation.hpp"
#include "ggof/cross_prob.hpp"
#include "ggof/stat_family.hpp"

namespace ggof {

enum class Sidedness { OneSided, TwoSided };

// Numerical rule for the mixture integral over the shared normal factor.
// Gauss-Legendre is the default; the trapezoid rule is the verification
// fallback and the right tool when the integrand develops sharp features
// (rho close to 1).
struct QuadratureSpec {
    enum class Rule { GaussLegendre, Trapezoid };
    Rule rule = Rule::GaussLegendre;
    int node_count = 64;
    double z_range = 8.0;

    void validate() const;
};

enum class Method { Auto, Iid, Equal, Wam, Loess, Mc };

struct LoessSpec {
    int m = 10;         // design points around the query threshold
    double eps = 1.0;   // half-width of the design window, statistic scale
    int n_draws = 0;    // rho samples per design point; 0 means n
};

// Approximation diagnostics surfaced to callers (and the CLI manifest).
struct EngineWarnings {
    int clamped_rho = 0;     // negative correlation samples clamped to 0
    bool iid_fallback = false;
    bool underflow = false;
};

// P-values from Gaussian input statistics.
std::vector<double> pvalues_from_stats(const std::vector<double>& t, Sidedness sided);

// Theorem-style evaluator for a fixed boundary vector u: the probability
// that all ordered p-values stay above u when the underlying statistics are
// equal-correlated Gaussians. Precomputes the normal quantiles of u once so
// repeated evaluation across rho values is cheap.
class EqualCorrBoundary {
public:
    EqualCorrBoundary(const std::vector<double>& u, Sidedness sided,
                      const QuadratureSpec& quad = {});

    // Value at the given correlation; rho = 0 reproduces the iid probability
    // through the same integral. Throws UnsupportedModelError for rho < 0.
    double prob(double rho) const;

    // Mean of prob over a multiset of rho samples. With many distinct samples
    // the values are read off a Chebyshev interpolant in rho (prob is smooth
    // in rho), keeping the cost independent of the sample count.
    double mixture_mean(const std::vector<double>& rhos) const;

private:
    Sidedness sided_;
    int n_ = 0;
    bool impossible_ = false;           // some u_i >= 1
    std::vector<int> active_;           // 0-based indices with u_i > 0
    std::vector<double> quantiles_;     // one-sided: Phi^-1(1-u); two-sided: Phi^-1(1-u/2)
    std::vector<double> nodes_;         // quadrature abscissae in z
    std::vector<double> weights_;       // weights folded with the normal density
};

// All survival_* functions return the lower tail P(S <= b); the complement
// is exposed as pvalue().

double survival_iid(double b, const StatFamily& family, const TruncationScheme& trunc,
                    int n, EngineWarnings* warnings = nullptr);

double survival_equal_corr(double b, const StatFamily& family, const TruncationScheme& trunc,
                           int n, double rho, Sidedness sided,
                           const QuadratureSpec& quad = {},
                           EngineWarnings* warnings = nullptr);

double survival_wam(double b, const StatFamily& family, const TruncationScheme& trunc,
                    const CorrelationModel& corr, double bandwidth_alpha = 0.5,
                    Sidedness sided = Sidedness::TwoSided,
                    const QuadratureSpec& quad = {},
                    EngineWarnings* warnings = nullptr);

double survival_loess(double b, const StatFamily& family, const TruncationScheme& trunc,
                      const CorrelationModel& corr, const LoessSpec& loess,
                      Sidedness sided, std::uint64_t seed,
                      const QuadratureSpec& quad = {},
                      EngineWarnings* warnings = nullptr);

struct PvalueOptions {
    Method method = Method::Auto;
    Sidedness sided = Sidedness::TwoSided;
    QuadratureSpec quad;
    LoessSpec loess;
    double wam_alpha = 0.5;
    std::uint64_t seed = 0;
    std::int64_t mc_sims = 100000;
};

Method resolve_method(Method method, const CorrelationModel& corr);

// 1 - survival via the selected engine; Auto picks iid for identity,
// the exact integral for equal (rho >= 0), WAM for Toeplitz and the LOESS
// surrogate for general matrices.
double pvalue(const GofResult& observed, const CorrelationModel& corr,
              const PvalueOptions& opts, EngineWarnings* warnings = nullptr);

// Cross-boundary probability of an arbitrary boundary vector under the given
// correlation model; the omnibus test reduces to this. For the LOESS engine a
// raw boundary has no statistic scale, so the collapsed-design rule applies:
// the mean over the sampled-rho equal-correlation values.
double boundary_survival(const BoundaryVector& u, const CorrelationModel& corr,
                         const PvalueOptions& opts,
                         EngineWarnings* warnings = nullptr);

}  // namespace ggof
