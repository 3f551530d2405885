#include "ggof/dep_pvalue.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "ggof/errors.hpp"
#include "ggof/normal.hpp"
#include "ggof/quadrature.hpp"
#include "ggof/rng.hpp"

namespace ggof {

namespace {

constexpr std::uint64_t kLoessTag = 0x10E55;
constexpr std::uint64_t kMcTag = 0xA1C0;

void integration_nodes(const QuadratureSpec& quad, std::vector<double>& zs,
                       std::vector<double>& ws) {
    quad.validate();
    const double r = quad.z_range;
    if (quad.rule == QuadratureSpec::Rule::GaussLegendre) {
        const GaussLegendreRule& rule = gauss_legendre(quad.node_count);
        zs.resize(quad.node_count);
        ws.resize(quad.node_count);
        for (int k = 0; k < quad.node_count; ++k) {
            zs[k] = r * rule.nodes[k];
            ws[k] = r * rule.weights[k] * norm_pdf(zs[k]);
        }
    } else {
        const int n = quad.node_count;
        const double h = 2.0 * r / (n - 1);
        zs.resize(n);
        ws.resize(n);
        for (int k = 0; k < n; ++k) {
            zs[k] = -r + k * h;
            ws[k] = ((k == 0 || k == n - 1) ? 0.5 * h : h) * norm_pdf(zs[k]);
        }
    }
}

// Near-diagonal weighted off-diagonal sample: uniform over unordered
// positions, which weights each diagonal by its length (n-j). Negative
// entries are clamped to zero and counted.
std::vector<double> sample_offdiagonals(const CorrelationModel& corr, int n_draws,
                                        std::uint64_t seed, std::uint64_t tag,
                                        EngineWarnings* warnings) {
    const int n = corr.n();
    RngStream rng(seed, substream(kLoessTag, tag));
    std::vector<double> rhos;
    rhos.reserve(static_cast<size_t>(n_draws));
    for (int d = 0; d < n_draws; ++d) {
        int i = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        while (i == j) {
            j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        }
        double rho = corr.entry(i, j);
        if (rho < 0.0) {
            rho = 0.0;
            if (warnings) ++warnings->clamped_rho;
        }
        rhos.push_back(rho);
    }
    return rhos;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (node_count < 16) throw DomainError("quadrature needs at least 16 nodes");
    if (!(z_range > 0.0)) throw DomainError("quadrature z_range must be positive");
}

std::vector<double> pvalues_from_stats(const std::vector<double>& t, Sidedness sided) {
    std::vector<double> p(t.size());
    for (size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i])) throw DomainError("input statistic is not finite");
        p[i] = sided == Sidedness::OneSided ? norm_sf(t[i]) : 2.0 * norm_sf(std::abs(t[i]));
    }
    return p;
}

EqualCorrBoundary::EqualCorrBoundary(const std::vector<double>& u, Sidedness sided,
                                     const QuadratureSpec& quad)
    : sided_(sided), n_(static_cast<int>(u.size())) {
    integration_nodes(quad, nodes_, weights_);
    for (int i = 0; i < n_; ++i) {
        const double ui = u[i];
        if (std::isnan(ui)) throw DomainError("boundary contains NaN");
        if (ui >= 1.0) {
            impossible_ = true;
            return;
        }
        if (ui <= 0.0) continue;  // vacuous constraint
        active_.push_back(i);
        quantiles_.push_back(sided == Sidedness::OneSided
                                 ? norm_upper_quantile(ui)
                                 : norm_upper_quantile(0.5 * ui));
    }
}

double EqualCorrBoundary::prob(double rho) const {
    if (rho < 0.0) {
        throw UnsupportedModelError(
            "equal-correlation engine requires rho >= 0 "
            "(sqrt(rho) mixture decomposition); use the loess or mc engines");
    }
    if (!(rho < 1.0)) throw DomainError("equal correlation must be < 1");
    if (impossible_) return 0.0;
    if (active_.empty()) return 1.0;

    const double s = std::sqrt(rho);
    const double t = std::sqrt(1.0 - rho);

    BoundaryVector bound;
    bound.n = n_;
    bound.c.assign(static_cast<size_t>(n_), 0.0);
    bound.k0 = active_.front() + 1;
    bound.k1 = active_.back() + 1;

    double total = 0.0;
    for (size_t k = 0; k < nodes_.size(); ++k) {
        const double shift = s * nodes_[k];
        for (size_t a = 0; a < active_.size(); ++a) {
            const double q = quantiles_[a];
            double ci;
            if (sided_ == Sidedness::OneSided) {
                ci = norm_sf((q - shift) / t);
            } else {
                ci = norm_sf((q - shift) / t) + norm_cdf((-q - shift) / t);
            }
            bound.c[active_[a]] = ci;
        }
        total += weights_[k] * cross_prob_iid(bound).value;
    }
    return std::min(1.0, std::max(0.0, total));
}

double EqualCorrBoundary::mixture_mean(const std::vector<double>& rhos) const {
    if (rhos.empty()) throw DomainError("mixture needs at least one rho sample");
    // Multiplicity-weighted distinct values; samples drawn from a matrix
    // repeat exactly.
    std::map<double, int> counts;
    for (double r : rhos) ++counts[r];

    constexpr int kCheb = 12;
    double total = 0.0;
    if (static_cast<int>(counts.size()) <= kCheb) {
        for (const auto& [r, c] : counts) total += c * prob(r);
        return total / rhos.size();
    }

    const double lo = counts.begin()->first;
    const double hi = counts.rbegin()->first;
    // Chebyshev nodes of the first kind on [lo, hi] with barycentric
    // interpolation; prob is smooth in rho, so 12 nodes carry ~1e-8 accuracy.
    double xs[kCheb], fs[kCheb], ws[kCheb];
    for (int k = 0; k < kCheb; ++k) {
        const double theta = M_PI * (2.0 * k + 1.0) / (2.0 * kCheb);
        xs[k] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(theta);
        fs[k] = prob(xs[k]);
        ws[k] = (k % 2 ? -1.0 : 1.0) * std::sin(theta);
    }
    for (const auto& [r, c] : counts) {
        double num = 0.0, den = 0.0;
        bool exact = false;
        for (int k = 0; k < kCheb; ++k) {
            const double dx = r - xs[k];
            if (dx == 0.0) {
                total += c * fs[k];
                exact = true;
                break;
            }
            const double w = ws[k] / dx;
            num += w * fs[k];
            den += w;
        }
        if (!exact) total += c * (num / den);
    }
    return std::min(1.0, std::max(0.0, total / rhos.size()));
}

double survival_iid(double b, const StatFamily& family, const TruncationScheme& trunc,
                    int n, EngineWarnings* warnings) {
    const BoundaryVector bound =
        BoundaryVector::ranged(rejection_boundary(family, trunc, n, b),
                               trunc.k0, trunc.resolved_k1(n));
    const CrossProb cp = cross_prob_iid(bound);
    if (warnings && cp.underflow) warnings->underflow = true;
    return cp.value;
}

double survival_equal_corr(double b, const StatFamily& family, const TruncationScheme& trunc,
                           int n, double rho, Sidedness sided,
                           const QuadratureSpec& quad, EngineWarnings* warnings) {
    (void)warnings;
    const std::vector<double> u = rejection_boundary(family, trunc, n, b);
    return EqualCorrBoundary(u, sided, quad).prob(rho);
}

double survival_wam(double b, const StatFamily& family, const TruncationScheme& trunc,
                    const CorrelationModel& corr, double bandwidth_alpha,
                    Sidedness sided, const QuadratureSpec& quad,
                    EngineWarnings* warnings) {
    const int n = corr.n();
    if (n < 2 || bandwidth_alpha <= 0.0) {
        return survival_iid(b, family, trunc, n, warnings);
    }
    int m = static_cast<int>(std::floor(bandwidth_alpha * n));
    m = std::max(1, std::min(m, n - 1));

    std::vector<double> rho(m);
    bool all_negative = true;
    int clamped = 0;
    for (int j = 1; j <= m; ++j) {
        double r = corr.off_diagonal_mean(j);
        if (r >= 0.0) {
            all_negative = false;
        } else {
            r = 0.0;
            ++clamped;
        }
        rho[j - 1] = r;
    }
    if (all_negative) {
        if (warnings) warnings->iid_fallback = true;
        return survival_iid(b, family, trunc, n, warnings);
    }
    if (warnings) warnings->clamped_rho += clamped;

    const std::vector<double> u = rejection_boundary(family, trunc, n, b);
    const EqualCorrBoundary integ(u, sided, quad);

    // Weights follow the relative off-diagonal lengths and are normalized to
    // sum to one for every bandwidth.
    double wsum = 0.0;
    for (int j = 1; j <= m; ++j) wsum += n - j;
    double total = 0.0;
    std::map<double, double> cache;
    for (int j = 1; j <= m; ++j) {
        const double w = (n - j) / wsum;
        auto it = cache.find(rho[j - 1]);
        if (it == cache.end()) it = cache.emplace(rho[j - 1], integ.prob(rho[j - 1])).first;
        total += w * it->second;
    }
    return std::min(1.0, std::max(0.0, total));
}

double survival_loess(double b, const StatFamily& family, const TruncationScheme& trunc,
                      const CorrelationModel& corr, const LoessSpec& loess,
                      Sidedness sided, std::uint64_t seed,
                      const QuadratureSpec& quad, EngineWarnings* warnings) {
    const int n = corr.n();
    if (n < 2) return survival_iid(b, family, trunc, n, warnings);
    const int m = std::max(1, loess.m);
    const int n_draws = loess.n_draws > 0 ? loess.n_draws : n;
    const double eps = loess.eps;

    std::vector<double> xs(m);       // design offsets, scaled to [-1, 1]
    std::vector<double> means(m);    // mean sampled value per design point
    std::vector<double> wts(m);      // tri-cube weights
    for (int i = 0; i < m; ++i) {
        const double x = m == 1 ? 0.0 : -1.0 + 2.0 * i / (m - 1.0);
        const double bi = b + eps * x;
        const std::vector<double> u = rejection_boundary(family, trunc, n, bi);
        const EqualCorrBoundary integ(u, sided, quad);
        const std::vector<double> rhos = sample_offdiagonals(
            corr, n_draws, seed, static_cast<std::uint64_t>(i), warnings);
        means[i] = integ.mixture_mean(rhos);
        xs[i] = x;
        const double ax = std::abs(x);
        const double t = 1.0 - ax * ax * ax;
        wts[i] = ax >= 1.0 ? 0.0 : t * t * t;
    }

    // Quadratic weighted least squares on the design means; prediction at the
    // window center is the intercept. Degenerate designs fall back to the
    // weighted mean.
    int usable = 0;
    for (int i = 0; i < m; ++i) usable += wts[i] > 0.0;
    double fitted;
    if (m < 3 || usable < 3) {
        double sw = 0.0, sy = 0.0;
        for (int i = 0; i < m; ++i) {
            const double w = wts[i] > 0.0 ? wts[i] : (usable == 0 ? 1.0 : 0.0);
            sw += w;
            sy += w * means[i];
        }
        fitted = sw > 0.0 ? sy / sw : means[m / 2];
    } else {
        Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
        Eigen::Vector3d aty = Eigen::Vector3d::Zero();
        for (int i = 0; i < m; ++i) {
            const double w = wts[i];
            if (w <= 0.0) continue;
            const Eigen::Vector3d phi(1.0, xs[i], xs[i] * xs[i]);
            ata += w * phi * phi.transpose();
            aty += w * phi * means[i];
        }
        Eigen::FullPivLU<Eigen::Matrix3d> lu(ata);
        if (lu.isInvertible()) {
            fitted = lu.solve(aty)(0);
        } else {
            double sw = 0.0, sy = 0.0;
            for (int i = 0; i < m; ++i) {
                sw += wts[i];
                sy += wts[i] * means[i];
            }
            fitted = sw > 0.0 ? sy / sw : means[m / 2];
        }
    }
    return std::min(1.0, std::max(0.0, fitted));
}

Method resolve_method(Method method, const CorrelationModel& corr) {
    if (method != Method::Auto) return method;
    switch (corr.kind()) {
        case CorrelationModel::Kind::Identity:
            return Method::Iid;
        case CorrelationModel::Kind::Equal:
            return corr.rho() >= 0.0 ? Method::Equal : Method::Loess;
        case CorrelationModel::Kind::Toeplitz:
            return Method::Wam;
        case CorrelationModel::Kind::General:
            return Method::Loess;
    }
    return Method::Iid;
}

namespace {

double mc_statistic_pvalue(const GofResult& observed, const CorrelationModel& corr,
                           const PvalueOptions& opts) {
    const int n = corr.n();
    const Eigen::MatrixXd sigma = corr.dense();
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefiniteError("correlation matrix is not positive definite", 0.0);
    }
    const Eigen::MatrixXd chol = llt.matrixL();

    std::int64_t exceed = 0;
    std::vector<double> t(static_cast<size_t>(n));
    std::vector<double> p(static_cast<size_t>(n));
    Eigen::VectorXd z(n);
    for (std::int64_t sim = 0; sim < opts.mc_sims; ++sim) {
        RngStream rng(opts.seed, substream(kMcTag, static_cast<std::uint64_t>(sim)));
        for (int i = 0; i < n; ++i) z(i) = rng.normal();
        const Eigen::VectorXd tv = chol * z;
        for (int i = 0; i < n; ++i) t[i] = tv(i);
        p = pvalues_from_stats(t, opts.sided);
        double stat;
        try {
            stat = compute_statistic(p, observed.family, observed.trunc).statistic;
        } catch (const EmptyRegionError&) {
            continue;  // sup over an empty region never exceeds the observation
        }
        exceed += stat >= observed.statistic;
    }
    return static_cast<double>(exceed) / static_cast<double>(opts.mc_sims);
}

double mc_boundary_survival(const BoundaryVector& u, const CorrelationModel& corr,
                            const PvalueOptions& opts) {
    const int n = corr.n();
    const Eigen::MatrixXd sigma = corr.dense();
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefiniteError("correlation matrix is not positive definite", 0.0);
    }
    const Eigen::MatrixXd chol = llt.matrixL();

    std::int64_t hits = 0;
    std::vector<double> p(static_cast<size_t>(n));
    Eigen::VectorXd z(n);
    for (std::int64_t sim = 0; sim < opts.mc_sims; ++sim) {
        RngStream rng(opts.seed, substream(kMcTag, static_cast<std::uint64_t>(sim)));
        for (int i = 0; i < n; ++i) z(i) = rng.normal();
        const Eigen::VectorXd tv = chol * z;
        for (int i = 0; i < n; ++i) {
            p[i] = opts.sided == Sidedness::OneSided ? norm_sf(tv(i))
                                                     : 2.0 * norm_sf(std::abs(tv(i)));
        }
        std::sort(p.begin(), p.end());
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            if (p[i] <= u.c[i]) {
                ok = false;
                break;
            }
        }
        hits += ok;
    }
    return static_cast<double>(hits) / static_cast<double>(opts.mc_sims);
}

}  // namespace

double pvalue(const GofResult& observed, const CorrelationModel& corr,
              const PvalueOptions& opts, EngineWarnings* warnings) {
    if (corr.n() != observed.n) {
        throw DimensionError("correlation model size does not match the statistic's n");
    }
    const Method method = resolve_method(opts.method, corr);
    double surv = 0.0;
    switch (method) {
        case Method::Iid:
            surv = survival_iid(observed.statistic, observed.family, observed.trunc,
                                observed.n, warnings);
            break;
        case Method::Equal:
            surv = survival_equal_corr(observed.statistic, observed.family, observed.trunc,
                                       observed.n, corr.rho(), opts.sided, opts.quad,
                                       warnings);
            break;
        case Method::Wam:
            surv = survival_wam(observed.statistic, observed.family, observed.trunc,
                                corr, opts.wam_alpha, opts.sided, opts.quad, warnings);
            break;
        case Method::Loess:
            surv = survival_loess(observed.statistic, observed.family, observed.trunc,
                                  corr, opts.loess, opts.sided, opts.seed, opts.quad,
                                  warnings);
            break;
        case Method::Mc:
            return mc_statistic_pvalue(observed, corr, opts);
        case Method::Auto:
            throw DomainError("unresolved engine");
    }
    return std::min(1.0, std::max(0.0, 1.0 - surv));
}

double boundary_survival(const BoundaryVector& u, const CorrelationModel& corr,
                         const PvalueOptions& opts, EngineWarnings* warnings) {
    if (corr.n() != u.n) {
        throw DimensionError("correlation model size does not match the boundary length");
    }
    const Method method = resolve_method(opts.method, corr);
    switch (method) {
        case Method::Iid: {
            const CrossProb cp = cross_prob_iid(u);
            if (warnings && cp.underflow) warnings->underflow = true;
            return cp.value;
        }
        case Method::Equal: {
            return EqualCorrBoundary(u.c, opts.sided, opts.quad).prob(corr.rho());
        }
        case Method::Wam: {
            const int n = corr.n();
            int m = static_cast<int>(std::floor(opts.wam_alpha * n));
            m = std::max(1, std::min(m, n - 1));
            const EqualCorrBoundary integ(u.c, opts.sided, opts.quad);
            bool all_negative = true;
            std::vector<double> rho(m);
            for (int j = 1; j <= m; ++j) {
                double r = corr.off_diagonal_mean(j);
                if (r >= 0.0) {
                    all_negative = false;
                } else {
                    r = 0.0;
                    if (warnings) ++warnings->clamped_rho;
                }
                rho[j - 1] = r;
            }
            if (all_negative) {
                if (warnings) warnings->iid_fallback = true;
                const CrossProb cp = cross_prob_iid(u);
                return cp.value;
            }
            double wsum = 0.0;
            for (int j = 1; j <= m; ++j) wsum += n - j;
            double total = 0.0;
            std::map<double, double> cache;
            for (int j = 1; j <= m; ++j) {
                auto it = cache.find(rho[j - 1]);
                if (it == cache.end()) it = cache.emplace(rho[j - 1], integ.prob(rho[j - 1])).first;
                total += ((n - j) / wsum) * it->second;
            }
            return std::min(1.0, std::max(0.0, total));
        }
        case Method::Loess: {
            // Exact enumerated mixture: the zero-variance limit of the
            // near-diagonal-weighted sampling design.
            const EqualCorrBoundary integ(u.c, opts.sided, opts.quad);
            const int n = corr.n();
            std::vector<double> rhos;
            rhos.reserve(static_cast<size_t>(n) * (n - 1) / 2);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < i; ++j) {
                    double rho = corr.entry(i, j);
                    if (rho < 0.0) {
                        rho = 0.0;
                        if (warnings) ++warnings->clamped_rho;
                    }
                    rhos.push_back(rho);
                }
            }
            if (rhos.empty()) {
                const CrossProb cp = cross_prob_iid(u);
                if (warnings && cp.underflow) warnings->underflow = true;
                return cp.value;
            }
            return integ.mixture_mean(rhos);
        }
        case Method::Mc:
            return mc_boundary_survival(u, corr, opts);
        case Method::Auto:
            break;
    }
    throw DomainError("unresolved engine");
}

}  // namespace ggof
