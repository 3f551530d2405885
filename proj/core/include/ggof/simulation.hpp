#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ggof/correlation.hpp"
#include "ggof/dep_pvalue.hpp"
#include "ggof/glm_stats.hpp"
#include "ggof/omnibus.hpp"
#include "ggof/rng.hpp"
#include "ggof/stat_family.hpp"
#include "ggof/transforms.hpp"

namespace ggof {

// ---------- correlation scenario generators ----------

struct BlockSpec {
    std::vector<std::pair<int, double>> blocks;  // (size, within-rho)
    Eigen::MatrixXd cross;                       // between-block rho, blocks x blocks
};

struct CorrelationSpec {
    enum class Kind { Equal, PolyDecay, ExpDecay, Block };
    Kind kind = Kind::Equal;
    double gamma = 0.0;
    BlockSpec block;
    int n = 0;

    static CorrelationSpec equal(int n, double gamma);
    static CorrelationSpec poly_decay(int n, double gamma);   // (1+|i-j|)^-gamma
    static CorrelationSpec exp_decay(int n, double gamma);    // gamma^|i-j|
    static CorrelationSpec two_block(int n_a, int n_b, double rho_a, double rho_b,
                                     double rho_ab);
};

// The specified matrix, unit diagonal, verified positive definite (the error
// path reports the smallest eigenvalue).
Eigen::MatrixXd gen_correlation(const CorrelationSpec& spec);

// Structured CorrelationModel matching the spec so downstream engines pick
// the cheapest exact method.
CorrelationModel correlation_model_for(const CorrelationSpec& spec);

// ---------- draws ----------

class MvnSampler {
public:
    explicit MvnSampler(const Eigen::MatrixXd& sigma);
    Eigen::VectorXd draw(RngStream& rng) const;
    Eigen::VectorXd draw_with_mean(const Eigen::VectorXd& mu, RngStream& rng) const;

private:
    Eigen::MatrixXd chol_;
};

// One multivariate normal draw; bit-identical for a fixed seed.
Eigen::VectorXd sample_gmm(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                           std::uint64_t seed);

// ---------- study configuration ----------

struct SignalSpec {
    enum class Placement { UniformRandom, Fixed, Clustered };
    int count = 0;
    double amplitude = 0.0;
    std::vector<double> amplitudes;  // optional per-signal values
    Placement placement = Placement::UniformRandom;
    std::vector<int> indices;        // 1-based, for Fixed
    int cluster_start = 1;           // 1-based, for Clustered
};

enum class CovariateKind { Gaussian, Genotype };
enum class FitSelector { Joint, Marginal, Decorrelated };
enum class TransformSelector { None, Dt, It };

struct TestSpec {
    std::string label;
    bool omnibus = false;
    StatFamily family = StatFamily::hc2004();
    TruncationScheme trunc;
    AdaptationGrid grid;                 // used when omnibus
    Method method = Method::Auto;
    Sidedness sided = Sidedness::TwoSided;
    TransformSelector transform = TransformSelector::None;  // gmm scenario
    FitSelector fit = FitSelector::Marginal;                // glm scenarios
};

struct StudyConfig {
    enum class Scenario { Gmm, Linear, Logistic };
    Scenario scenario = Scenario::Gmm;
    CorrelationSpec correlation;
    SignalSpec signal;
    int n = 0;
    int n_obs = 0;  // N, rows of the design (glm scenarios)
    int replicates = 0;
    std::vector<double> alphas{0.05};
    std::vector<TestSpec> tests;
    QuadratureSpec quad;
    LoessSpec loess;
    double wam_alpha = 0.5;
    std::uint64_t seed = 0;
    int threads = 1;
    CovariateKind covariates = CovariateKind::Gaussian;
    double maf = 0.3;
    bool add_controls = false;      // Bernoulli(0.5) and N(0,1) pair
    double control_gamma1 = 0.5;
    double control_gamma2 = 0.1;
    bool intercept = false;         // prepend a column of ones to z
    double lm_sigma = 1.0;
    bool estimate_sigma = false;
    std::vector<double> amplitude_grid;  // power study x-axis (amplitude)
    std::vector<int> count_grid;         // or signal-count axis
};

// One dataset of the configured scenario; streams derive from
// (seed, replicate_index) so replicates are independent and reproducible.
GlmDataset sample_glm_dataset(const StudyConfig& cfg, int replicate_index);

// ---------- studies ----------

struct RateRow {
    std::string test;
    double alpha;
    double rate;
    double mc_std_error;
};

// Null rejection rates per test and level; requires a zero signal.
std::vector<RateRow> run_type1_study(const StudyConfig& cfg);

struct PowerRow {
    std::string test;
    double grid_value;  // amplitude or signal count
    double power;
    double mc_std_error;
};

// Rejection proportion at the alpha-critical value across the signal grid.
std::vector<PowerRow> run_power_study(const StudyConfig& cfg);

}  // namespace ggof
