#include "ggof/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <thread>

#include "ggof/errors.hpp"
#include "ggof/normal.hpp"
#include "ggof/quadrature.hpp"

namespace ggof {

namespace {

constexpr std::uint64_t kTagGmmDraw = 0x6A3;
constexpr std::uint64_t kTagPlacement = 0x5167;
constexpr std::uint64_t kTagLatent = 0x1A7;
constexpr std::uint64_t kTagControls = 0xC771;
constexpr std::uint64_t kTagNoise = 0x901;
constexpr std::uint64_t kTagEngine = 0x5EED;

void parallel_for(int total, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1) {
        for (int i = 0; i < total; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const int chunk = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(total, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

Eigen::VectorXd build_signal(const SignalSpec& signal, int n, RngStream& rng) {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
    if (signal.count == 0) return beta;
    if (signal.count > n) throw DomainError("more signals than positions");
    std::vector<int> where;
    switch (signal.placement) {
        case SignalSpec::Placement::UniformRandom: {
            // Partial Fisher-Yates over 1..n.
            std::vector<int> pool(n);
            for (int i = 0; i < n; ++i) pool[i] = i;
            for (int k = 0; k < signal.count; ++k) {
                const int j = k + static_cast<int>(rng.uniform_int(n - k));
                std::swap(pool[k], pool[j]);
                where.push_back(pool[k]);
            }
            break;
        }
        case SignalSpec::Placement::Fixed:
            if (static_cast<int>(signal.indices.size()) < signal.count) {
                throw DomainError("fixed placement needs `count` indices");
            }
            for (int k = 0; k < signal.count; ++k) where.push_back(signal.indices[k] - 1);
            break;
        case SignalSpec::Placement::Clustered:
            for (int k = 0; k < signal.count; ++k) {
                where.push_back(signal.cluster_start - 1 + k);
            }
            break;
    }
    for (int k = 0; k < signal.count; ++k) {
        const int pos = where[k];
        if (pos < 0 || pos >= n) throw DomainError("signal position out of range");
        const double a = signal.amplitudes.empty()
                             ? signal.amplitude
                             : signal.amplitudes[k % signal.amplitudes.size()];
        beta(pos) = a;
    }
    return beta;
}

bool has_signal(const SignalSpec& s) {
    if (s.count == 0) return false;
    if (!s.amplitudes.empty()) {
        for (double a : s.amplitudes)
            if (a != 0.0) return true;
        return false;
    }
    return s.amplitude != 0.0;
}

}  // namespace

CorrelationSpec CorrelationSpec::equal(int n, double gamma) {
    CorrelationSpec s;
    s.kind = Kind::Equal;
    s.n = n;
    s.gamma = gamma;
    return s;
}

CorrelationSpec CorrelationSpec::poly_decay(int n, double gamma) {
    CorrelationSpec s;
    s.kind = Kind::PolyDecay;
    s.n = n;
    s.gamma = gamma;
    return s;
}

CorrelationSpec CorrelationSpec::exp_decay(int n, double gamma) {
    CorrelationSpec s;
    s.kind = Kind::ExpDecay;
    s.n = n;
    s.gamma = gamma;
    return s;
}

CorrelationSpec CorrelationSpec::two_block(int n_a, int n_b, double rho_a, double rho_b,
                                           double rho_ab) {
    CorrelationSpec s;
    s.kind = Kind::Block;
    s.n = n_a + n_b;
    s.block.blocks = {{n_a, rho_a}, {n_b, rho_b}};
    s.block.cross = Eigen::MatrixXd::Constant(2, 2, rho_ab);
    return s;
}

Eigen::MatrixXd gen_correlation(const CorrelationSpec& spec) {
    const int n = spec.n;
    if (n < 1) throw DomainError("correlation spec needs n >= 1");
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(n, n);
    switch (spec.kind) {
        case CorrelationSpec::Kind::Equal:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) sigma(i, j) = spec.gamma;
            break;
        case CorrelationSpec::Kind::PolyDecay:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) sigma(i, j) = std::pow(1.0 + std::abs(i - j), -spec.gamma);
            break;
        case CorrelationSpec::Kind::ExpDecay:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) sigma(i, j) = std::pow(spec.gamma, std::abs(i - j));
            break;
        case CorrelationSpec::Kind::Block: {
            int total = 0;
            for (const auto& [size, rho] : spec.block.blocks) total += size;
            if (total != n) throw DimensionError("block sizes must sum to n");
            const int nb = static_cast<int>(spec.block.blocks.size());
            if (spec.block.cross.size() != 0 &&
                (spec.block.cross.rows() != nb || spec.block.cross.cols() != nb)) {
                throw DimensionError("cross-block matrix must be blocks x blocks");
            }
            int row0 = 0;
            for (int a = 0; a < nb; ++a) {
                const auto& [size_a, rho_a] = spec.block.blocks[a];
                for (int i = 0; i < size_a; ++i)
                    for (int j = 0; j < size_a; ++j)
                        if (i != j) sigma(row0 + i, row0 + j) = rho_a;
                int col0 = 0;
                for (int b = 0; b < a; ++b) {
                    const int size_b = spec.block.blocks[b].first;
                    const double rho_ab =
                        spec.block.cross.size() == 0 ? 0.0 : spec.block.cross(a, b);
                    for (int i = 0; i < size_a; ++i)
                        for (int j = 0; j < size_b; ++j) {
                            sigma(row0 + i, col0 + j) = rho_ab;
                            sigma(col0 + j, row0 + i) = rho_ab;
                        }
                    col0 += size_b;
                }
                row0 += size_a;
            }
            break;
        }
    }
    try {
        cholesky_lower(sigma);
    } catch (const SingularMatrixError&) {
        const double min_ev =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma).eigenvalues().minCoeff();
        throw NotPositiveDefiniteError(
            "generated correlation matrix is not positive definite (min eigenvalue " +
                std::to_string(min_ev) + ")",
            min_ev);
    }
    return sigma;
}

CorrelationModel correlation_model_for(const CorrelationSpec& spec) {
    switch (spec.kind) {
        case CorrelationSpec::Kind::Equal:
            if (spec.gamma == 0.0) return CorrelationModel::identity(spec.n);
            return CorrelationModel::equal(spec.n, spec.gamma);
        case CorrelationSpec::Kind::PolyDecay:
        case CorrelationSpec::Kind::ExpDecay: {
            std::vector<double> lags(static_cast<size_t>(spec.n - 1));
            for (int j = 1; j < spec.n; ++j) {
                lags[j - 1] = spec.kind == CorrelationSpec::Kind::PolyDecay
                                  ? std::pow(1.0 + j, -spec.gamma)
                                  : std::pow(spec.gamma, j);
            }
            return CorrelationModel::toeplitz(std::move(lags));
        }
        case CorrelationSpec::Kind::Block:
            return CorrelationModel::general(gen_correlation(spec));
    }
    throw DomainError("unknown correlation spec");
}

MvnSampler::MvnSampler(const Eigen::MatrixXd& sigma) : chol_(cholesky_lower(sigma)) {}

Eigen::VectorXd MvnSampler::draw(RngStream& rng) const {
    Eigen::VectorXd z(chol_.rows());
    for (int i = 0; i < z.size(); ++i) z(i) = rng.normal();
    return chol_ * z;
}

Eigen::VectorXd MvnSampler::draw_with_mean(const Eigen::VectorXd& mu, RngStream& rng) const {
    return mu + draw(rng);
}

Eigen::VectorXd sample_gmm(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                           std::uint64_t seed) {
    if (sigma.rows() != mu.size()) throw DimensionError("mu and sigma disagree");
    MvnSampler sampler(sigma);
    RngStream rng(seed, kTagGmmDraw);
    return sampler.draw_with_mean(mu, rng);
}

namespace {

// Correlation of the thresholded genotype pair when the latent bivariate
// normal has correlation r. Marginals are exactly Binomial(2, maf).
double genotype_corr(double r, double q0, double q1, double maf) {
    if (r == 0.0) return 0.0;
    const double s = std::sqrt(1.0 - r * r);
    const GaussLegendreRule& rule = gauss_legendre(64);
    auto upper_quadrant = [&](double a, double b) {
        const double hi = 8.5;
        if (a >= hi) return 0.0;
        const double mid = 0.5 * (a + hi);
        const double half = 0.5 * (hi - a);
        double acc = 0.0;
        for (size_t k = 0; k < rule.nodes.size(); ++k) {
            const double t = mid + half * rule.nodes[k];
            acc += half * rule.weights[k] * norm_pdf(t) * norm_sf((b - r * t) / s);
        }
        return acc;
    };
    double cov = 0.0;
    for (double a : {q0, q1}) {
        for (double b : {q0, q1}) {
            cov += upper_quadrant(a, b) - norm_sf(a) * norm_sf(b);
        }
    }
    return cov / (2.0 * maf * (1.0 - maf));
}

// Latent correlation whose thresholded genotypes realize the target; the
// genotype correlation is monotone in the latent one.
double inflate_latent(double target, double q0, double q1, double maf) {
    if (target == 0.0) return 0.0;
    double lo = target > 0.0 ? 0.0 : -0.999;
    double hi = target > 0.0 ? 0.999 : 0.0;
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (genotype_corr(mid, q0, q1, maf) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Everything derived from the config that is shared across replicates.
struct DatasetSampler {
    const StudyConfig& cfg;
    Eigen::MatrixXd chol;  // latent covariate correlation factor
    double q0 = 0.0;       // genotype thresholds
    double q1 = 0.0;

    explicit DatasetSampler(const StudyConfig& c) : cfg(c) {
        Eigen::MatrixXd latent = gen_correlation(c.correlation);
        if (cfg.covariates == CovariateKind::Genotype) {
            const double maf = cfg.maf;
            if (!(maf > 0.0 && maf < 1.0)) throw DomainError("maf must lie in (0,1)");
            q0 = norm_quantile((1.0 - maf) * (1.0 - maf));
            q1 = norm_quantile(1.0 - maf * maf);
            // Pre-inflate the latent correlations so the realized genotype
            // correlations hit the requested ones.
            std::map<double, double> cache;
            for (int i = 0; i < latent.rows(); ++i) {
                for (int j = 0; j < i; ++j) {
                    const double target = latent(i, j);
                    auto it = cache.find(target);
                    if (it == cache.end()) {
                        it = cache.emplace(target, inflate_latent(target, q0, q1, maf)).first;
                    }
                    latent(i, j) = latent(j, i) = it->second;
                }
            }
        }
        try {
            chol = cholesky_lower(latent);
        } catch (const SingularMatrixError&) {
            const double min_ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(latent)
                                      .eigenvalues()
                                      .minCoeff();
            throw NotPositiveDefiniteError(
                "latent covariate correlation is not positive definite (min eigenvalue " +
                    std::to_string(min_ev) + ")",
                min_ev);
        }
    }

    GlmDataset sample(int rep, const SignalSpec& signal) const {
        const int n = cfg.n;
        const int n_obs = cfg.n_obs;
        if (n_obs < 1) throw DomainError("glm scenarios need n_obs >= 1");

        RngStream latent_rng(cfg.seed, substream(kTagLatent, static_cast<std::uint64_t>(rep)));
        Eigen::MatrixXd x(n_obs, n);
        Eigen::VectorXd z(n);
        for (int k = 0; k < n_obs; ++k) {
            for (int i = 0; i < n; ++i) z(i) = latent_rng.normal();
            x.row(k) = (chol * z).transpose();
        }
        if (cfg.covariates == CovariateKind::Genotype) {
            for (int k = 0; k < n_obs; ++k)
                for (int i = 0; i < n; ++i) {
                    const double v = x(k, i);
                    x(k, i) = v < q0 ? 0.0 : (v < q1 ? 1.0 : 2.0);
                }
        }

        RngStream place_rng(cfg.seed, substream(kTagPlacement, static_cast<std::uint64_t>(rep)));
        const Eigen::VectorXd beta = build_signal(signal, n, place_rng);

        int m = 0;
        if (cfg.intercept) ++m;
        if (cfg.add_controls) m += 2;
        Eigen::MatrixXd zc(n_obs, m);
        Eigen::VectorXd gamma = Eigen::VectorXd::Zero(m);
        int col = 0;
        if (cfg.intercept) {
            zc.col(col).setOnes();
            gamma(col) = 0.0;
            ++col;
        }
        if (cfg.add_controls) {
            RngStream ctrl_rng(cfg.seed, substream(kTagControls, static_cast<std::uint64_t>(rep)));
            for (int k = 0; k < n_obs; ++k) zc(k, col) = ctrl_rng.uniform() < 0.5 ? 0.0 : 1.0;
            gamma(col) = cfg.control_gamma1;
            for (int k = 0; k < n_obs; ++k) zc(k, col + 1) = ctrl_rng.normal();
            gamma(col + 1) = cfg.control_gamma2;
        }

        Eigen::VectorXd eta = x * beta;
        if (m > 0) eta += zc * gamma;

        GlmDataset ds;
        ds.x = std::move(x);
        ds.z = std::move(zc);
        ds.sigma = cfg.lm_sigma;
        ds.estimate_sigma = cfg.estimate_sigma;
        RngStream noise_rng(cfg.seed, substream(kTagNoise, static_cast<std::uint64_t>(rep)));
        if (cfg.scenario == StudyConfig::Scenario::Logistic) {
            ds.model = ModelKind::Logistic;
            ds.y.resize(n_obs);
            for (int k = 0; k < n_obs; ++k) {
                const double p = 1.0 / (1.0 + std::exp(-eta(k)));
                ds.y(k) = noise_rng.uniform() < p ? 1.0 : 0.0;
            }
        } else {
            ds.model = ModelKind::Linear;
            ds.y.resize(n_obs);
            for (int k = 0; k < n_obs; ++k) ds.y(k) = eta(k) + cfg.lm_sigma * noise_rng.normal();
        }
        return ds;
    }
};

// Per-test context for the Gmm scenario: transform matrix and the transformed
// correlation model, shared across replicates.
struct GmmTestContext {
    bool transformed = false;
    Eigen::MatrixXd vmat;
    CorrelationModel corr = CorrelationModel::identity(1);
};

GmmTestContext make_gmm_context(const TestSpec& test, const CorrelationSpec& spec,
                                const Eigen::MatrixXd& sigma) {
    GmmTestContext ctx;
    if (test.transform == TransformSelector::None) {
        ctx.corr = correlation_model_for(spec);
        return ctx;
    }
    ctx.transformed = true;
    ctx.vmat = transform_matrix(sigma, test.transform == TransformSelector::Dt
                                           ? TransformKind::dt()
                                           : TransformKind::it());
    if (test.transform == TransformSelector::Dt) {
        ctx.corr = CorrelationModel::identity(static_cast<int>(sigma.rows()));
    } else {
        Eigen::MatrixXd out = ctx.vmat * sigma * ctx.vmat.transpose();
        for (int i = 0; i < out.rows(); ++i) out(i, i) = 1.0;
        ctx.corr = CorrelationModel::general(std::move(out));
    }
    return ctx;
}

PvalueOptions engine_options(const StudyConfig& cfg, const TestSpec& test, int test_index,
                             int rep) {
    PvalueOptions opts;
    opts.method = test.method;
    opts.sided = test.sided;
    opts.quad = cfg.quad;
    opts.loess = cfg.loess;
    opts.wam_alpha = cfg.wam_alpha;
    opts.seed = stream_key(cfg.seed, substream(kTagEngine, static_cast<std::uint64_t>(rep),
                                               static_cast<std::uint64_t>(test_index)));
    return opts;
}

double test_pvalue(const TestSpec& test, const std::vector<double>& pvals,
                   const CorrelationModel& corr, const PvalueOptions& opts) {
    if (test.omnibus) {
        const OmnibusResult res = diggof_statistic(pvals, test.grid, corr, opts);
        OmnibusOptions oo;
        oo.pv = opts;
        oo.fast_inversion = resolve_method(opts.method, corr) == Method::Loess;
        return diggof_pvalue(res, test.grid, corr, oo);
    }
    const GofResult stat = compute_statistic(pvals, test.family, test.trunc);
    return pvalue(stat, corr, opts);
}

void validate_study(const StudyConfig& cfg, bool power) {
    if (cfg.n < 1) throw DomainError("study needs n >= 1");
    if (cfg.replicates < 100) throw DomainError("studies report rates from >= 100 replicates");
    if (cfg.tests.empty()) throw DomainError("study needs at least one test");
    if (cfg.alphas.empty()) throw DomainError("study needs at least one alpha");
    for (const TestSpec& t : cfg.tests) {
        if (t.omnibus && t.grid.n != cfg.n) {
            throw DimensionError("omnibus grid n must match the study n");
        }
    }
    if (power) {
        if (cfg.amplitude_grid.empty() == cfg.count_grid.empty()) {
            throw DomainError("power study needs exactly one of amplitude_grid/count_grid");
        }
    }
}

}  // namespace

GlmDataset sample_glm_dataset(const StudyConfig& cfg, int replicate_index) {
    if (cfg.scenario == StudyConfig::Scenario::Gmm) {
        throw DomainError("sample_glm_dataset requires a linear or logistic scenario");
    }
    return DatasetSampler(cfg).sample(replicate_index, cfg.signal);
}

std::vector<RateRow> run_type1_study(const StudyConfig& cfg) {
    validate_study(cfg, false);
    if (has_signal(cfg.signal)) {
        throw DomainError("type-I studies require a zero signal");
    }
    const int n_tests = static_cast<int>(cfg.tests.size());
    const int reps = cfg.replicates;
    std::vector<double> pmat(static_cast<size_t>(reps) * n_tests, 1.0);

    if (cfg.scenario == StudyConfig::Scenario::Gmm) {
        const Eigen::MatrixXd sigma = gen_correlation(cfg.correlation);
        const MvnSampler sampler(sigma);
        std::vector<GmmTestContext> ctx;
        for (const TestSpec& t : cfg.tests) ctx.push_back(make_gmm_context(t, cfg.correlation, sigma));
        parallel_for(reps, cfg.threads, [&](int rep) {
            RngStream rng(cfg.seed, substream(kTagGmmDraw, static_cast<std::uint64_t>(rep)));
            const Eigen::VectorXd t0 = sampler.draw(rng);
            for (int ti = 0; ti < n_tests; ++ti) {
                const Eigen::VectorXd tv = ctx[ti].transformed ? (ctx[ti].vmat * t0).eval() : t0;
                std::vector<double> stats(tv.data(), tv.data() + tv.size());
                const std::vector<double> pv = pvalues_from_stats(stats, cfg.tests[ti].sided);
                pmat[static_cast<size_t>(rep) * n_tests + ti] =
                    test_pvalue(cfg.tests[ti], pv, ctx[ti].corr,
                                engine_options(cfg, cfg.tests[ti], ti, rep));
            }
        });
    } else {
        const DatasetSampler sampler(cfg);
        parallel_for(reps, cfg.threads, [&](int rep) {
            const GlmDataset ds = sampler.sample(rep, cfg.signal);
            // Fit lazily; tests often share a selector.
            std::optional<FitOutput> marginal, joint;
            std::optional<Eigen::VectorXd> decor;
            for (int ti = 0; ti < n_tests; ++ti) {
                const TestSpec& test = cfg.tests[ti];
                std::vector<double> stats;
                CorrelationModel corr = CorrelationModel::identity(cfg.n);
                switch (test.fit) {
                    case FitSelector::Marginal:
                        if (!marginal) marginal = marginal_statistics(ds);
                        stats.assign(marginal->t_m.data(), marginal->t_m.data() + cfg.n);
                        corr = CorrelationModel::general(marginal->sigma_tm);
                        break;
                    case FitSelector::Joint:
                        if (!joint) joint = joint_statistics(ds);
                        stats.assign(joint->t_j.data(), joint->t_j.data() + cfg.n);
                        corr = CorrelationModel::general(joint->sigma_tj);
                        break;
                    case FitSelector::Decorrelated:
                        if (!decor) decor = decorrelated_statistics(ds);
                        stats.assign(decor->data(), decor->data() + cfg.n);
                        break;
                }
                const std::vector<double> pv = pvalues_from_stats(stats, test.sided);
                pmat[static_cast<size_t>(rep) * n_tests + ti] =
                    test_pvalue(test, pv, corr, engine_options(cfg, test, ti, rep));
            }
        });
    }

    std::vector<RateRow> rows;
    for (int ti = 0; ti < n_tests; ++ti) {
        for (double alpha : cfg.alphas) {
            int hits = 0;
            for (int rep = 0; rep < reps; ++rep) {
                hits += pmat[static_cast<size_t>(rep) * n_tests + ti] <= alpha;
            }
            const double rate = static_cast<double>(hits) / reps;
            rows.push_back({cfg.tests[ti].label, alpha, rate,
                            std::sqrt(rate * (1.0 - rate) / reps)});
        }
    }
    return rows;
}

std::vector<PowerRow> run_power_study(const StudyConfig& cfg) {
    validate_study(cfg, true);
    const int n_tests = static_cast<int>(cfg.tests.size());
    const int reps = cfg.replicates;
    const double alpha = cfg.alphas.front();
    const bool amplitude_axis = !cfg.amplitude_grid.empty();
    const int n_grid = amplitude_axis ? static_cast<int>(cfg.amplitude_grid.size())
                                      : static_cast<int>(cfg.count_grid.size());

    std::vector<PowerRow> rows;

    if (cfg.scenario == StudyConfig::Scenario::Gmm) {
        const Eigen::MatrixXd sigma = gen_correlation(cfg.correlation);
        const MvnSampler sampler(sigma);
        std::vector<GmmTestContext> ctx;
        for (const TestSpec& t : cfg.tests) ctx.push_back(make_gmm_context(t, cfg.correlation, sigma));

        // Null distributions do not depend on the signal grid: fix the
        // alpha-critical value per test once.
        std::vector<double> crit(n_tests);      // statistic threshold
        std::vector<double> crit_so(n_tests);   // omnibus s_o threshold
        for (int ti = 0; ti < n_tests; ++ti) {
            const TestSpec& test = cfg.tests[ti];
            const PvalueOptions opts = engine_options(cfg, test, ti, /*rep=*/-1);
            if (!test.omnibus) {
                crit[ti] = critical_threshold({test.family, test.trunc}, alpha,
                                              ctx[ti].corr, opts).b;
            } else {
                // Bisection on s: diggof_pvalue is monotone in s_o.
                OmnibusOptions oo;
                oo.pv = opts;
                oo.fast_inversion = resolve_method(opts.method, ctx[ti].corr) == Method::Loess;
                double lo = 1e-10, hi = 0.9;
                for (int iter = 0; iter < 40; ++iter) {
                    const double mid = 0.5 * (lo + hi);
                    OmnibusResult pseudo;
                    pseudo.s_o = mid;
                    const double p = diggof_pvalue(pseudo, test.grid, ctx[ti].corr, oo);
                    (p > alpha ? hi : lo) = mid;
                    if (hi - lo < 1e-10) break;
                }
                crit_so[ti] = 0.5 * (lo + hi);
            }
        }

        for (int g = 0; g < n_grid; ++g) {
            SignalSpec signal = cfg.signal;
            if (amplitude_axis) {
                signal.amplitude = cfg.amplitude_grid[g];
                if (signal.count == 0) signal.count = 1;
            } else {
                signal.count = cfg.count_grid[g];
            }
            std::vector<std::uint8_t> reject(static_cast<size_t>(reps) * n_tests, 0);
            parallel_for(reps, cfg.threads, [&](int rep) {
                RngStream place_rng(cfg.seed,
                                    substream(kTagPlacement, static_cast<std::uint64_t>(rep),
                                              static_cast<std::uint64_t>(g)));
                const Eigen::VectorXd mu = build_signal(signal, cfg.n, place_rng);
                RngStream rng(cfg.seed, substream(kTagGmmDraw, static_cast<std::uint64_t>(rep),
                                                  static_cast<std::uint64_t>(g)));
                const Eigen::VectorXd t0 = sampler.draw_with_mean(mu, rng);
                for (int ti = 0; ti < n_tests; ++ti) {
                    const TestSpec& test = cfg.tests[ti];
                    const Eigen::VectorXd tv =
                        ctx[ti].transformed ? (ctx[ti].vmat * t0).eval() : t0;
                    std::vector<double> stats(tv.data(), tv.data() + tv.size());
                    const std::vector<double> pv = pvalues_from_stats(stats, test.sided);
                    bool rej;
                    if (!test.omnibus) {
                        rej = compute_statistic(pv, test.family, test.trunc).statistic > crit[ti];
                    } else {
                        const OmnibusResult res = diggof_statistic(
                            pv, test.grid, ctx[ti].corr,
                            engine_options(cfg, test, ti, rep));
                        rej = res.s_o < crit_so[ti];
                    }
                    reject[static_cast<size_t>(rep) * n_tests + ti] = rej;
                }
            });
            for (int ti = 0; ti < n_tests; ++ti) {
                int hits = 0;
                for (int rep = 0; rep < reps; ++rep) {
                    hits += reject[static_cast<size_t>(rep) * n_tests + ti];
                }
                const double power = static_cast<double>(hits) / reps;
                rows.push_back({cfg.tests[ti].label,
                                amplitude_axis ? cfg.amplitude_grid[g]
                                               : static_cast<double>(cfg.count_grid[g]),
                                power, std::sqrt(power * (1.0 - power) / reps)});
            }
        }
        return rows;
    }

    // GLM scenarios: the null distribution is data-dependent, so reject by
    // the per-replicate analytical p-value.
    const DatasetSampler sampler(cfg);
    for (int g = 0; g < n_grid; ++g) {
        SignalSpec signal = cfg.signal;
        if (amplitude_axis) {
            signal.amplitude = cfg.amplitude_grid[g];
            if (signal.count == 0) signal.count = 1;
        } else {
            signal.count = cfg.count_grid[g];
        }
        std::vector<std::uint8_t> reject(static_cast<size_t>(reps) * n_tests, 0);
        parallel_for(reps, cfg.threads, [&](int rep) {
            const GlmDataset ds = sampler.sample(rep, signal);
            std::optional<FitOutput> marginal, joint;
            std::optional<Eigen::VectorXd> decor;
            for (int ti = 0; ti < n_tests; ++ti) {
                const TestSpec& test = cfg.tests[ti];
                std::vector<double> stats;
                CorrelationModel corr = CorrelationModel::identity(cfg.n);
                switch (test.fit) {
                    case FitSelector::Marginal:
                        if (!marginal) marginal = marginal_statistics(ds);
                        stats.assign(marginal->t_m.data(), marginal->t_m.data() + cfg.n);
                        corr = CorrelationModel::general(marginal->sigma_tm);
                        break;
                    case FitSelector::Joint:
                        if (!joint) joint = joint_statistics(ds);
                        stats.assign(joint->t_j.data(), joint->t_j.data() + cfg.n);
                        corr = CorrelationModel::general(joint->sigma_tj);
                        break;
                    case FitSelector::Decorrelated:
                        if (!decor) decor = decorrelated_statistics(ds);
                        stats.assign(decor->data(), decor->data() + cfg.n);
                        break;
                }
                const std::vector<double> pv = pvalues_from_stats(stats, test.sided);
                const double p = test_pvalue(test, pv, corr,
                                             engine_options(cfg, test, ti, rep));
                reject[static_cast<size_t>(rep) * n_tests + ti] = p <= alpha;
            }
        });
        for (int ti = 0; ti < n_tests; ++ti) {
            int hits = 0;
            for (int rep = 0; rep < reps; ++rep) {
                hits += reject[static_cast<size_t>(rep) * n_tests + ti];
            }
            const double power = static_cast<double>(hits) / reps;
            rows.push_back({cfg.tests[ti].label,
                            amplitude_axis ? cfg.amplitude_grid[g]
                                           : static_cast<double>(cfg.count_grid[g]),
                            power, std::sqrt(power * (1.0 - power) / reps)});
        }
    }
    return rows;
}

}  // namespace ggof
