#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "cli_io.hpp"
#include "ggof/errors.hpp"
#include "ggof/glm_stats.hpp"
#include "ggof/transforms.hpp"

namespace {

using nlohmann::json;
using namespace ggof;
using namespace ggof::cli;

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Engine flags shared by the test-like subcommands.
struct EngineFlags {
    std::string method = "auto";
    std::string sided = "two";
    std::uint64_t seed = 0;
    std::int64_t sims = 100000;
    int quad_nodes = 64;
    std::string quad_rule = "gl";
    int loess_m = 10;
    double loess_eps = 1.0;
    int loess_draws = 0;
    double wam_alpha = 0.5;
    int threads = 1;

    void attach(CLI::App* app) {
        app->add_option("--method", method, "p-value engine: auto|iid|equal|wam|loess|mc");
        app->add_option("--sided", sided, "input p-value sidedness: one|two");
        app->add_option("--seed", seed, "RNG seed for stochastic engines");
        app->add_option("--sims", sims, "simulation count for --method mc");
        app->add_option("--quad-nodes", quad_nodes, "quadrature nodes (>= 16)");
        app->add_option("--quad-rule", quad_rule, "quadrature rule: gl|trapezoid");
        app->add_option("--loess-m", loess_m, "LOESS design points");
        app->add_option("--loess-eps", loess_eps, "LOESS window half-width");
        app->add_option("--loess-draws", loess_draws, "LOESS rho draws per design point (0: n)");
        app->add_option("--wam-alpha", wam_alpha, "WAM bandwidth fraction");
        app->add_option("--threads", threads, "worker threads for studies");
    }

    PvalueOptions options() const {
        PvalueOptions opts;
        opts.method = parse_method(method);
        opts.sided = parse_sided(sided);
        opts.seed = seed;
        opts.mc_sims = sims;
        opts.quad.node_count = quad_nodes;
        opts.quad.rule = quad_rule == "trapezoid" ? QuadratureSpec::Rule::Trapezoid
                                                  : QuadratureSpec::Rule::GaussLegendre;
        opts.loess.m = loess_m;
        opts.loess.eps = loess_eps;
        opts.loess.n_draws = loess_draws;
        opts.wam_alpha = wam_alpha;
        return opts;
    }

    json to_json() const {
        json j;
        j["method"] = method;
        j["sided"] = sided;
        j["seed"] = seed;
        j["sims"] = sims;
        j["quad_nodes"] = quad_nodes;
        j["quad_rule"] = quad_rule;
        j["loess"] = {{"m", loess_m}, {"eps", loess_eps}, {"draws", loess_draws}};
        j["wam_alpha"] = wam_alpha;
        return j;
    }
};

PvalueOptions options_from_json(const json& j) {
    PvalueOptions opts;
    opts.method = parse_method(j.value("method", std::string("auto")));
    opts.sided = parse_sided(j.value("sided", std::string("two")));
    opts.seed = j.value("seed", std::uint64_t{0});
    opts.mc_sims = j.value("sims", std::int64_t{100000});
    opts.quad.node_count = j.value("quad_nodes", 64);
    opts.quad.rule = j.value("quad_rule", std::string("gl")) == "trapezoid"
                         ? QuadratureSpec::Rule::Trapezoid
                         : QuadratureSpec::Rule::GaussLegendre;
    if (j.contains("loess")) {
        opts.loess.m = j["loess"].value("m", 10);
        opts.loess.eps = j["loess"].value("eps", 1.0);
        opts.loess.n_draws = j["loess"].value("draws", 0);
    }
    opts.wam_alpha = j.value("wam_alpha", 0.5);
    return opts;
}

// Test-spec flags shared by `test` and `glm`.
struct TestFlags {
    std::string family = "hc2004";
    double s = 2.0;
    double family_alpha = 0.05;
    int k0 = 1;
    int k1 = 0;
    double alpha0 = 0.0;
    double alpha1 = 1.0;
    std::string grid;  // nonempty selects the omnibus test

    void attach(CLI::App* app) {
        app->add_option("--family", family,
                        "statistic kernel: hc2004|hc2008|bj|rbj|ks|bonferroni|fdr|phi");
        app->add_option("--s", s, "phi-divergence index (with --family phi)");
        app->add_option("--alpha", family_alpha, "level inside bonferroni/fdr kernels");
        app->add_option("--k0", k0, "first rank in the truncation (1-based)");
        app->add_option("--k1", k1, "last rank in the truncation (0: n)");
        app->add_option("--alpha0", alpha0, "lower p-value magnitude bound");
        app->add_option("--alpha1", alpha1, "upper p-value magnitude bound");
        app->add_option("--grid", grid, "omnibus grid: 'default' or a JSON grid file");
    }

    StatFamily stat_family() const { return parse_family(family, s, family_alpha); }
    TruncationScheme trunc() const { return {k0, k1, alpha0, alpha1}; }

    json to_json(int n) const {
        json j;
        if (!grid.empty()) {
            j["omnibus"] = true;
            json entries = json::array();
            for (const GridEntry& e : parse_grid(grid, n).entries) {
                entries.push_back({{"s", e.family.s},
                                   {"k0", e.trunc.k0},
                                   {"k1", e.trunc.resolved_k1(n)}});
            }
            j["entries"] = entries;
        } else {
            j["omnibus"] = false;
            j["family"] = family;
            j["s"] = s;
            j["family_alpha"] = family_alpha;
            j["k0"] = k0;
            j["k1"] = k1;
            j["alpha0"] = alpha0;
            j["alpha1"] = alpha1;
        }
        return j;
    }
};

AdaptationGrid grid_from_record(const json& jt, int n) {
    AdaptationGrid grid;
    grid.n = n;
    for (const json& je : jt.at("entries")) {
        GridEntry e;
        e.family = StatFamily::phi_divergence(je.at("s").get<double>());
        e.trunc = TruncationScheme::index_range(je.at("k0").get<int>(), je.at("k1").get<int>());
        grid.entries.push_back(e);
    }
    return grid;
}

CorrelationModel correlation_from_json(const json& jc) {
    const std::string kind = jc.at("kind").get<std::string>();
    const int n = jc.at("n").get<int>();
    if (kind == "identity") return CorrelationModel::identity(n);
    if (kind == "equal") return CorrelationModel::equal(n, jc.at("rho").get<double>());
    if (kind == "toeplitz") {
        return CorrelationModel::toeplitz(jc.at("lags").get<std::vector<double>>());
    }
    Eigen::MatrixXd m(n, n);
    const json& rows = jc.at("matrix");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rows.at(i).at(j).get<double>();
    return CorrelationModel::general(std::move(m));
}

// Shared back end: run the configured single or omnibus test on p-values.
json run_test_stage(const std::vector<double>& pvals, const CorrelationModel& corr,
                    const TestFlags& tf, const PvalueOptions& opts,
                    EngineWarnings* warnings) {
    const int n = static_cast<int>(pvals.size());
    json results;
    if (!tf.grid.empty()) {
        const AdaptationGrid grid = parse_grid(tf.grid, n);
        const OmnibusResult res = diggof_statistic(pvals, grid, corr, opts, warnings);
        OmnibusOptions oo;
        oo.pv = opts;
        std::vector<double> u_star;
        const double p = diggof_pvalue(res, grid, corr, oo, &u_star, warnings);
        results["s_o"] = res.s_o;
        results["chosen_entry"] = res.chosen_entry;
        results["chosen_label"] = grid.entries[res.chosen_entry].label();
        json per_entry = json::array();
        for (size_t j = 0; j < grid.entries.size(); ++j) {
            per_entry.push_back({{"label", grid.entries[j].label()},
                                 {"pvalue", res.per_entry_pvalues[j]}});
        }
        results["per_entry"] = per_entry;
        results["u_star"] = u_star;
        results["pvalue"] = p;
    } else {
        const GofResult stat = compute_statistic(pvals, tf.stat_family(), tf.trunc());
        const double p = pvalue(stat, corr, opts, warnings);
        results["statistic"] = stat.statistic;
        results["argmax_index"] = stat.argmax_index;
        results["pvalue"] = p;
        if (tf.stat_family().kind == FamilyKind::Bonferroni ||
            tf.stat_family().kind == FamilyKind::Fdr) {
            results["reject"] = stat.statistic > 0.0;
        }
    }
    results["engine"] = [&] {
        switch (resolve_method(opts.method, corr)) {
            case Method::Iid: return "iid";
            case Method::Equal: return "equal";
            case Method::Wam: return "wam";
            case Method::Loess: return "loess";
            case Method::Mc: return "mc";
            case Method::Auto: break;
        }
        return "?";
    }();
    return results;
}

int finish_record(json& record, const std::string& out, const std::string& command,
                  std::uint64_t seed, const EngineWarnings& warnings,
                  const std::chrono::steady_clock::time_point& t0) {
    record["schema_version"] = "1";
    record["manifest"] = make_manifest(command, seed, seconds_since(t0), warnings);
    const bool bad = contains_nan(record["results"]);
    write_json(out, record);
    if (bad) {
        std::cerr << "error: nan_in_output: results contain NaN\n";
        return kFailure;
    }
    return kOk;
}

// ---------------------------------------------------------------------------

int cmd_test(const std::string& pvalues_file, const std::string& stats_file,
             const std::string& corr_spec, const TestFlags& tf, const EngineFlags& ef,
             const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    json inputs;
    std::vector<double> pvals;
    if (!stats_file.empty()) {
        const std::vector<double> stats = read_vector_csv(stats_file);
        pvals = pvalues_from_stats(stats, parse_sided(ef.sided));
        inputs["stats"] = stats;
    } else {
        pvals = read_vector_csv(pvalues_file);
    }
    inputs["pvalues"] = pvals;
    const int n = static_cast<int>(pvals.size());

    const CorrelationModel corr = parse_correlation(corr_spec, n);
    corr.validate();
    if (corr.n() != n) {
        throw DimensionError("correlation is " + std::to_string(corr.n()) + "x" +
                             std::to_string(corr.n()) + " but " + std::to_string(n) +
                             " inputs were given");
    }
    inputs["correlation"] = correlation_to_json(corr);
    inputs["engine"] = ef.to_json();

    EngineWarnings warnings;
    json record;
    record["inputs"] = inputs;
    record["test"] = tf.to_json(n);
    record["results"] = run_test_stage(pvals, corr, tf, ef.options(), &warnings);
    return finish_record(record, out, "test", ef.seed, warnings, t0);
}

int cmd_glm(const std::string& y_file, const std::string& x_file, const std::string& z_file,
            const std::string& model, const std::string& sigma_arg, const std::string& fit,
            const std::string& transform, const TestFlags& tf, const EngineFlags& ef,
            const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    GlmDataset ds;
    const std::vector<double> y = read_vector_csv(y_file);
    ds.y = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
    ds.x = read_matrix_csv(x_file);
    if (!z_file.empty()) ds.z = read_matrix_csv(z_file);
    if (ds.x.rows() != ds.y.size() || (ds.z.size() != 0 && ds.z.rows() != ds.y.size())) {
        throw DimensionError("y has " + std::to_string(ds.y.size()) +
                             " rows; design files disagree");
    }
    if (model == "linear") {
        ds.model = ModelKind::Linear;
    } else if (model == "logistic") {
        ds.model = ModelKind::Logistic;
    } else {
        throw IoError("unknown model '" + model + "'");
    }
    if (sigma_arg == "estimate") {
        ds.estimate_sigma = true;
    } else {
        ds.sigma = std::stod(sigma_arg);
    }

    const int n = static_cast<int>(ds.x.cols());
    Eigen::VectorXd t;
    CorrelationModel corr = CorrelationModel::identity(n);
    if (fit == "joint") {
        const FitOutput fo = joint_statistics(ds);
        t = fo.t_j;
        corr = CorrelationModel::general(fo.sigma_tj);
    } else if (fit == "marginal") {
        const FitOutput fo = marginal_statistics(ds);
        t = fo.t_m;
        corr = CorrelationModel::general(fo.sigma_tm);
    } else if (fit == "decorrelated") {
        t = decorrelated_statistics(ds);
    } else {
        throw IoError("unknown fit selector '" + fit + "'");
    }

    std::string applied_transform = transform;
    if (transform != "none") {
        GaussianStatVector v;
        v.t = t;
        v.sigma = corr.dense();
        GaussianStatVector w;
        if (transform == "dt") {
            w = decorrelate(v);
            corr = CorrelationModel::identity(n);
        } else if (transform == "it") {
            w = innovate(v);
            corr = CorrelationModel::general(w.sigma);
        } else if (transform.rfind("banded:", 0) == 0) {
            w = banded_transform(v, std::stoi(transform.substr(7)));
            corr = CorrelationModel::general(w.sigma);
        } else {
            throw IoError("unknown transform '" + transform + "'");
        }
        t = w.t;
    }

    const std::vector<double> stats(t.data(), t.data() + t.size());
    const std::vector<double> pvals = pvalues_from_stats(stats, parse_sided(ef.sided));

    json inputs;
    inputs["stats"] = stats;
    inputs["pvalues"] = pvals;
    inputs["correlation"] = correlation_to_json(corr);
    inputs["engine"] = ef.to_json();
    inputs["fit"] = fit;
    inputs["transform"] = applied_transform;
    inputs["model"] = model;

    EngineWarnings warnings;
    json record;
    record["inputs"] = inputs;
    record["test"] = tf.to_json(n);
    record["results"] = run_test_stage(pvals, corr, tf, ef.options(), &warnings);
    return finish_record(record, out, "glm", ef.seed, warnings, t0);
}

int cmd_boundary(const TestFlags& tf, const EngineFlags& ef, int n, double b, double alpha,
                 bool use_alpha, const std::string& corr_spec, const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    EngineWarnings warnings;
    double threshold = b;
    if (use_alpha) {
        const CorrelationModel corr = parse_correlation(corr_spec, n);
        corr.validate();
        threshold = critical_threshold({tf.stat_family(), tf.trunc()}, alpha, corr,
                                       ef.options(), &warnings).b;
    }
    const std::vector<double> u = rejection_boundary(tf.stat_family(), tf.trunc(), n, threshold);

    std::ofstream csv(out);
    if (!csv) throw IoError("cannot write '" + out + "'");
    csv.precision(17);
    csv << "index,u\n";
    for (int i = 1; i <= n; ++i) csv << i << "," << u[i - 1] << "\n";
    csv.close();

    json manifest = make_manifest("boundary", ef.seed, seconds_since(t0), warnings);
    manifest["b"] = threshold;
    manifest["family"] = tf.stat_family().name();
    manifest["n"] = n;
    write_json(out + ".manifest.json", manifest);
    return kOk;
}

int cmd_snr(const std::string& mu_file, const std::string& corr_spec,
            const std::string& transform, bool scan_bn, const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> mu_raw = read_vector_csv(mu_file);
    const Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(mu_raw.data(), mu_raw.size());
    const int n = static_cast<int>(mu.size());
    const CorrelationModel corr = parse_correlation(corr_spec, n);
    corr.validate();
    if (corr.n() != n) {
        throw DimensionError("correlation size does not match the mean vector");
    }
    const Eigen::MatrixXd sigma = corr.dense();

    std::ofstream csv(out);
    if (!csv) throw IoError("cannot write '" + out + "'");
    csv.precision(17);
    json manifest = make_manifest("snr", 0, 0.0, {});
    if (scan_bn) {
        csv << "b_n,max_snr\n";
        for (int b_n = 1; b_n <= n; ++b_n) {
            csv << b_n << "," << snr_report(mu, sigma, TransformKind::banded(b_n)).max_snr
                << "\n";
        }
    } else {
        TransformKind kind = TransformKind::it();
        if (transform == "dt") {
            kind = TransformKind::dt();
        } else if (transform == "it") {
            kind = TransformKind::it();
        } else if (transform.rfind("banded:", 0) == 0) {
            kind = TransformKind::banded(std::stoi(transform.substr(7)));
        } else {
            throw IoError("unknown transform '" + transform + "'");
        }
        const SnrReport rep = snr_report(mu, sigma, kind);
        csv << "index,snr\n";
        for (int j = 0; j < n; ++j) csv << j + 1 << "," << rep.snr(j) << "\n";
        manifest["max_snr"] = rep.max_snr;
        manifest["argmax"] = rep.argmax;
    }
    csv.close();
    manifest["wall_time_s"] = seconds_since(t0);
    write_json(out + ".manifest.json", manifest);
    return kOk;
}

int run_study(const std::string& config_file, bool power, std::optional<std::uint64_t> seed,
              int threads_override, const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const json doc = read_json(config_file);
    if (!doc.contains("seed") && !seed.has_value()) {
        throw DomainError("study commands require a seed (config \"seed\" or --seed)");
    }
    StudyConfig cfg = parse_study_config(config_file);
    if (seed.has_value()) cfg.seed = *seed;
    if (threads_override > 0) cfg.threads = threads_override;

    std::ofstream csv(out);
    if (!csv) throw IoError("cannot write '" + out + "'");
    csv.precision(12);
    if (power) {
        const std::vector<PowerRow> rows = run_power_study(cfg);
        csv << "test,grid_value,power,std_error\n";
        for (const PowerRow& r : rows) {
            csv << r.test << "," << r.grid_value << "," << r.power << "," << r.mc_std_error
                << "\n";
        }
    } else {
        const std::vector<RateRow> rows = run_type1_study(cfg);
        csv << "test,alpha,rate,std_error\n";
        for (const RateRow& r : rows) {
            csv << r.test << "," << r.alpha << "," << r.rate << "," << r.mc_std_error << "\n";
        }
    }
    csv.close();

    json manifest = make_manifest(power ? "power" : "simulate", cfg.seed,
                                  seconds_since(t0), {});
    manifest["config"] = doc;
    manifest["threads"] = cfg.threads;
    write_json(out + ".manifest.json", manifest);
    log_info("study finished in " + std::to_string(seconds_since(t0)) + " s");
    return kOk;
}

int cmd_verify(const std::string& record_file) {
    const json record = read_json(record_file);
    const json& inputs = record.at("inputs");
    const std::vector<double> pvals = inputs.at("pvalues").get<std::vector<double>>();
    const CorrelationModel corr = correlation_from_json(inputs.at("correlation"));
    const PvalueOptions opts = options_from_json(inputs.at("engine"));
    const json& jt = record.at("test");
    const int n = static_cast<int>(pvals.size());

    double recomputed;
    if (jt.at("omnibus").get<bool>()) {
        const AdaptationGrid grid = grid_from_record(jt, n);
        const OmnibusResult res = diggof_statistic(pvals, grid, corr, opts);
        OmnibusOptions oo;
        oo.pv = opts;
        recomputed = diggof_pvalue(res, grid, corr, oo);
    } else {
        const StatFamily fam = parse_family(jt.at("family").get<std::string>(),
                                            jt.value("s", 2.0), jt.value("family_alpha", 0.05));
        TruncationScheme trunc{jt.value("k0", 1), jt.value("k1", 0), jt.value("alpha0", 0.0),
                               jt.value("alpha1", 1.0)};
        recomputed = pvalue(compute_statistic(pvals, fam, trunc), corr, opts);
    }
    const double recorded = record.at("results").at("pvalue").get<double>();
    if (std::abs(recomputed - recorded) <= 1e-12) {
        std::cout << "ok: pvalue reproduces to 1e-12 (" << recomputed << ")\n";
        return kOk;
    }
    std::cerr << "error: verify_mismatch: recomputed " << recomputed << " vs recorded "
              << recorded << "\n";
    return kFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"goodness-of-fit signal detection for correlated data"};
    app.require_subcommand(1);

    // ---- test ----
    auto* test = app.add_subcommand("test", "statistic + p-value from a p-value/statistic file");
    std::string t_pvalues, t_stats, t_corr = "identity", t_out = "-";
    TestFlags t_tf;
    EngineFlags t_ef;
    test->add_option("--pvalues", t_pvalues, "single-column CSV of p-values");
    test->add_option("--stats", t_stats, "single-column CSV of Gaussian statistics");
    test->add_option("--corr", t_corr,
                     "identity | equal:RHO | poly:G | exp:G | toeplitz:FILE | matrix CSV");
    test->add_option("--out", t_out, "result record path (default stdout)");
    t_tf.attach(test);
    t_ef.attach(test);

    // ---- glm ----
    auto* glm = app.add_subcommand("glm", "regression-derived statistics, then the test stage");
    std::string g_y, g_x, g_z, g_model = "linear", g_sigma = "1.0", g_fit = "marginal",
                g_transform = "none", g_out = "-";
    TestFlags g_tf;
    EngineFlags g_ef;
    glm->add_option("--y", g_y, "response vector CSV")->required();
    glm->add_option("--x", g_x, "inquiry design CSV (N x n)")->required();
    glm->add_option("--z", g_z, "control design CSV (N x m)");
    glm->add_option("--model", g_model, "linear|logistic");
    glm->add_option("--sigma", g_sigma, "linear noise scale or 'estimate'");
    glm->add_option("--fit", g_fit, "joint|marginal|decorrelated");
    glm->add_option("--transform", g_transform, "none|dt|it|banded:B");
    glm->add_option("--out", g_out, "result record path (default stdout)");
    g_tf.attach(glm);
    g_ef.attach(glm);

    // ---- boundary ----
    auto* boundary = app.add_subcommand("boundary", "rejection boundary u_i as CSV");
    TestFlags b_tf;
    EngineFlags b_ef;
    int b_n = 0;
    double b_b = 0.0, b_alpha = 0.05;
    std::string b_corr = "identity", b_out = "boundary.csv";
    bool b_use_alpha = false;
    boundary->add_option("--n", b_n, "number of ranks")->required();
    boundary->add_option("--b", b_b, "statistic threshold");
    boundary->add_flag("--at-alpha", b_use_alpha,
                       "derive the threshold from --alpha via the engine");
    boundary->add_option("--alpha-level", b_alpha, "target type-I level with --at-alpha");
    boundary->add_option("--corr", b_corr, "correlation for --at-alpha");
    boundary->add_option("--out", b_out, "output CSV path");
    b_tf.attach(boundary);
    b_ef.attach(boundary);

    // ---- snr ----
    auto* snr = app.add_subcommand("snr", "transformed signal-to-noise report as CSV");
    std::string s_mu, s_corr, s_transform = "it", s_out = "snr.csv";
    bool s_scan = false;
    snr->add_option("--mu", s_mu, "mean vector CSV")->required();
    snr->add_option("--corr", s_corr, "correlation spec or matrix CSV")->required();
    snr->add_option("--transform", s_transform, "dt|it|banded:B");
    snr->add_flag("--scan-bn", s_scan, "emit max SNR for every band width");
    snr->add_option("--out", s_out, "output CSV path");

    // ---- simulate / power ----
    auto* sim = app.add_subcommand("simulate", "type-I error study from a JSON config");
    std::string sim_config, sim_out = "type1.csv";
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    int sim_threads = 0;
    sim->add_option("--config", sim_config, "study config JSON")->required();
    sim->add_option("--out", sim_out, "output CSV path");
    sim->add_option("--seed", sim_seed, "seed override")->each([&](const std::string&) {
        sim_seed_set = true;
    });
    sim->add_option("--threads", sim_threads, "thread override");

    auto* pow = app.add_subcommand("power", "power study from a JSON config");
    std::string pow_config, pow_out = "power.csv";
    std::uint64_t pow_seed = 0;
    bool pow_seed_set = false;
    int pow_threads = 0;
    pow->add_option("--config", pow_config, "study config JSON")->required();
    pow->add_option("--out", pow_out, "output CSV path");
    pow->add_option("--seed", pow_seed, "seed override")->each([&](const std::string&) {
        pow_seed_set = true;
    });
    pow->add_option("--threads", pow_threads, "thread override");

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "recompute a result record and compare");
    std::string v_record;
    verify->add_option("record", v_record, "result record JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (test->parsed()) {
            if (t_pvalues.empty() == t_stats.empty()) {
                std::cerr << "error: bad_arguments: give exactly one of --pvalues/--stats\n";
                return kFailure;
            }
            return cmd_test(t_pvalues, t_stats, t_corr, t_tf, t_ef, t_out);
        }
        if (glm->parsed()) {
            return cmd_glm(g_y, g_x, g_z, g_model, g_sigma, g_fit, g_transform, g_tf, g_ef,
                           g_out);
        }
        if (boundary->parsed()) {
            return cmd_boundary(b_tf, b_ef, b_n, b_b, b_alpha, b_use_alpha, b_corr, b_out);
        }
        if (snr->parsed()) {
            return cmd_snr(s_mu, s_corr, s_transform, s_scan, s_out);
        }
        if (sim->parsed()) {
            return run_study(sim_config, false,
                             sim_seed_set ? std::optional<std::uint64_t>(sim_seed)
                                          : std::nullopt,
                             sim_threads, sim_out);
        }
        if (pow->parsed()) {
            return run_study(pow_config, true,
                             pow_seed_set ? std::optional<std::uint64_t>(pow_seed)
                                          : std::nullopt,
                             pow_threads, pow_out);
        }
        if (verify->parsed()) {
            return cmd_verify(v_record);
        }
    } catch (const DimensionError& e) {
        std::cerr << "error: dimension_mismatch: " << e.what() << "\n";
        return kDimensionMismatch;
    } catch (const NotPositiveDefiniteError& e) {
        std::cerr << "error: not_positive_definite: " << e.what() << "\n";
        return kNotPositiveDefinite;
    } catch (const IoError& e) {
        std::cerr << "error: unreadable_file: " << e.what() << "\n";
        return kUnreadableFile;
    } catch (const Error& e) {
        std::cerr << "error: failure: " << e.what() << "\n";
        return kFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: failure: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
