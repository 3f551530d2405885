#include "cli_io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ggof/version.hpp"

namespace ggof::cli {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& tok, const std::string& where) {
    try {
        size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError("cannot parse number '" + tok + "' in " + where);
    }
}

}  // namespace

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("GGOF_LOG");
        if (!env) return 1;
        const std::string v(env);
        if (v == "silent" || v == "0") return 0;
        if (v == "debug" || v == "2") return 2;
        return 1;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "ggof: " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "ggof[debug]: " << msg << "\n";
}

std::vector<double> read_vector_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(parse_double(split(line, ',').front(), path));
    }
    if (out.empty()) throw IoError("'" + path + "' holds no values");
    return out;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const std::string& tok : split(line, ',')) row.push_back(parse_double(tok, path));
        if (!rows.empty() && rows.front().size() != row.size()) {
            throw IoError("ragged rows in '" + path + "'");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("'" + path + "' holds no values");
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows.front().size(); ++j) m(i, j) = rows[i][j];
    return m;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ",";
            out << m(i, j);
        }
        out << "\n";
    }
}

CorrelationModel parse_correlation(const std::string& spec, int n_hint) {
    const std::vector<std::string> parts = split(spec, ':');
    const std::string& kind = parts.front();
    auto arg_n = [&](size_t idx) {
        if (parts.size() > idx) return static_cast<int>(parse_double(parts[idx], "corr spec"));
        if (n_hint > 0) return n_hint;
        throw IoError("correlation spec '" + spec + "' needs an explicit length");
    };
    if (kind == "identity") {
        return CorrelationModel::identity(arg_n(1));
    }
    if (kind == "equal") {
        if (parts.size() < 2) throw IoError("equal correlation needs a rho: equal:RHO");
        return CorrelationModel::equal(arg_n(2), parse_double(parts[1], "corr spec"));
    }
    if (kind == "poly" || kind == "exp") {
        if (parts.size() < 2) throw IoError(kind + " correlation needs a gamma");
        const double gamma = parse_double(parts[1], "corr spec");
        const int n = arg_n(2);
        const CorrelationSpec cs = kind == "poly" ? CorrelationSpec::poly_decay(n, gamma)
                                                  : CorrelationSpec::exp_decay(n, gamma);
        return correlation_model_for(cs);
    }
    if (kind == "toeplitz") {
        if (parts.size() < 2) throw IoError("toeplitz correlation needs a lag file");
        return CorrelationModel::toeplitz(read_vector_csv(parts[1]));
    }
    // Otherwise: a dense matrix file.
    Eigen::MatrixXd m = read_matrix_csv(spec);
    if (m.rows() != m.cols()) {
        throw DimensionError("correlation matrix in '" + spec + "' is not square");
    }
    return CorrelationModel::general(std::move(m));
}

StatFamily parse_family(const std::string& name, double s, double family_alpha) {
    if (name == "hc2004" || name == "hc") return StatFamily::hc2004();
    if (name == "hc2008" || name == "rhc") return StatFamily::hc2008();
    if (name == "bj") return StatFamily::berk_jones();
    if (name == "rbj") return StatFamily::reverse_berk_jones();
    if (name == "ks") return StatFamily::ks_plus();
    if (name == "bonferroni") return StatFamily::bonferroni(family_alpha);
    if (name == "fdr") return StatFamily::fdr(family_alpha);
    if (name == "phi") return StatFamily::phi_divergence(s);
    throw IoError("unknown family '" + name + "'");
}

Method parse_method(const std::string& name) {
    if (name == "auto") return Method::Auto;
    if (name == "iid") return Method::Iid;
    if (name == "equal") return Method::Equal;
    if (name == "wam") return Method::Wam;
    if (name == "loess") return Method::Loess;
    if (name == "mc") return Method::Mc;
    throw IoError("unknown method '" + name + "'");
}

Sidedness parse_sided(const std::string& name) {
    if (name == "one") return Sidedness::OneSided;
    if (name == "two") return Sidedness::TwoSided;
    throw IoError("unknown sidedness '" + name + "'");
}

AdaptationGrid parse_grid(const std::string& spec, int n) {
    if (spec == "default") return AdaptationGrid::default_grid(n);
    const json doc = read_json(spec);
    std::vector<double> s = doc.value("s", std::vector<double>{-1.0, 0.0, 1.0, 2.0});
    std::vector<int> k0 = doc.value("k0", std::vector<int>{1});
    std::vector<int> k1 = doc.value("k1", std::vector<int>{n});
    return AdaptationGrid::cross(s, k0, k1, n);
}

namespace {

TestSpec parse_test_spec(const json& jt, int n) {
    TestSpec t;
    t.label = jt.value("label", std::string("test"));
    t.omnibus = jt.value("omnibus", false);
    if (t.omnibus) {
        if (jt.contains("grid") && jt["grid"].is_object()) {
            const json& jg = jt["grid"];
            t.grid = AdaptationGrid::cross(
                jg.value("s", std::vector<double>{-1.0, 0.0, 1.0, 2.0}),
                jg.value("k0", std::vector<int>{1, 2}),
                jg.value("k1", std::vector<int>{(n + 1) / 2, n}), n);
        } else {
            t.grid = AdaptationGrid::default_grid(n);
        }
    } else {
        t.family = parse_family(jt.value("family", std::string("hc2004")),
                                jt.value("s", 2.0), jt.value("family_alpha", 0.05));
        t.trunc.k0 = jt.value("k0", 1);
        t.trunc.k1 = jt.value("k1", 0);
        t.trunc.alpha0 = jt.value("alpha0", 0.0);
        t.trunc.alpha1 = jt.value("alpha1", 1.0);
    }
    t.method = parse_method(jt.value("method", std::string("auto")));
    t.sided = parse_sided(jt.value("sided", std::string("two")));
    const std::string fit = jt.value("fit", std::string("marginal"));
    if (fit == "joint") {
        t.fit = FitSelector::Joint;
    } else if (fit == "marginal") {
        t.fit = FitSelector::Marginal;
    } else if (fit == "decorrelated") {
        t.fit = FitSelector::Decorrelated;
    } else {
        throw IoError("unknown fit selector '" + fit + "'");
    }
    const std::string tr = jt.value("transform", std::string("none"));
    if (tr == "none") {
        t.transform = TransformSelector::None;
    } else if (tr == "dt") {
        t.transform = TransformSelector::Dt;
    } else if (tr == "it") {
        t.transform = TransformSelector::It;
    } else {
        throw IoError("unknown transform selector '" + tr + "'");
    }
    return t;
}

CorrelationSpec parse_correlation_spec(const json& jc, int n) {
    const std::string kind = jc.value("kind", std::string("equal"));
    if (kind == "equal") return CorrelationSpec::equal(n, jc.value("gamma", 0.0));
    if (kind == "poly") return CorrelationSpec::poly_decay(n, jc.value("gamma", 1.0));
    if (kind == "exp") return CorrelationSpec::exp_decay(n, jc.value("gamma", 0.5));
    if (kind == "block") {
        CorrelationSpec s;
        s.kind = CorrelationSpec::Kind::Block;
        s.n = n;
        for (const json& jb : jc.at("blocks")) {
            s.block.blocks.emplace_back(jb.at(0).get<int>(), jb.at(1).get<double>());
        }
        const size_t nb = s.block.blocks.size();
        s.block.cross = Eigen::MatrixXd::Zero(nb, nb);
        if (jc.contains("cross")) {
            const json& jx = jc["cross"];
            for (size_t i = 0; i < nb; ++i)
                for (size_t j = 0; j < nb; ++j)
                    s.block.cross(i, j) = jx.at(i).at(j).get<double>();
        }
        return s;
    }
    throw IoError("unknown correlation kind '" + kind + "'");
}

}  // namespace

StudyConfig parse_study_config(const std::string& path) {
    const json doc = read_json(path);
    StudyConfig cfg;
    const std::string scenario = doc.value("scenario", std::string("gmm"));
    if (scenario == "gmm") {
        cfg.scenario = StudyConfig::Scenario::Gmm;
    } else if (scenario == "linear") {
        cfg.scenario = StudyConfig::Scenario::Linear;
    } else if (scenario == "logistic") {
        cfg.scenario = StudyConfig::Scenario::Logistic;
    } else {
        throw IoError("unknown scenario '" + scenario + "'");
    }
    cfg.n = doc.at("n").get<int>();
    cfg.n_obs = doc.value("n_obs", 0);
    cfg.replicates = doc.at("replicates").get<int>();
    cfg.alphas = doc.value("alphas", std::vector<double>{0.05});
    cfg.correlation = parse_correlation_spec(doc.value("correlation", json::object()), cfg.n);
    if (doc.contains("signal")) {
        const json& js = doc["signal"];
        cfg.signal.count = js.value("count", 0);
        cfg.signal.amplitude = js.value("amplitude", 0.0);
        cfg.signal.amplitudes = js.value("amplitudes", std::vector<double>{});
        const std::string place = js.value("placement", std::string("uniform"));
        if (place == "uniform") {
            cfg.signal.placement = SignalSpec::Placement::UniformRandom;
        } else if (place == "fixed") {
            cfg.signal.placement = SignalSpec::Placement::Fixed;
        } else if (place == "clustered") {
            cfg.signal.placement = SignalSpec::Placement::Clustered;
        } else {
            throw IoError("unknown placement '" + place + "'");
        }
        cfg.signal.indices = js.value("indices", std::vector<int>{});
        cfg.signal.cluster_start = js.value("cluster_start", 1);
    }
    const std::string cov = doc.value("covariates", std::string("gaussian"));
    if (cov == "gaussian") {
        cfg.covariates = CovariateKind::Gaussian;
    } else if (cov == "genotype") {
        cfg.covariates = CovariateKind::Genotype;
    } else {
        throw IoError("unknown covariate kind '" + cov + "'");
    }
    cfg.maf = doc.value("maf", 0.3);
    cfg.add_controls = doc.value("controls", false);
    cfg.intercept = doc.value("intercept", false);
    cfg.lm_sigma = doc.value("sigma", 1.0);
    cfg.estimate_sigma = doc.value("estimate_sigma", false);
    cfg.quad.node_count = doc.value("quad_nodes", 64);
    if (doc.contains("loess")) {
        cfg.loess.m = doc["loess"].value("m", 10);
        cfg.loess.eps = doc["loess"].value("eps", 1.0);
        cfg.loess.n_draws = doc["loess"].value("draws", 0);
    }
    cfg.wam_alpha = doc.value("wam_alpha", 0.5);
    cfg.threads = doc.value("threads", 1);
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    cfg.amplitude_grid = doc.value("amplitude_grid", std::vector<double>{});
    cfg.count_grid = doc.value("count_grid", std::vector<int>{});
    for (const json& jt : doc.at("tests")) cfg.tests.push_back(parse_test_spec(jt, cfg.n));
    return cfg;
}

json correlation_to_json(const CorrelationModel& corr) {
    json out;
    out["n"] = corr.n();
    switch (corr.kind()) {
        case CorrelationModel::Kind::Identity:
            out["kind"] = "identity";
            break;
        case CorrelationModel::Kind::Equal:
            out["kind"] = "equal";
            out["rho"] = corr.rho();
            break;
        case CorrelationModel::Kind::Toeplitz:
            out["kind"] = "toeplitz";
            out["lags"] = corr.lags();
            break;
        case CorrelationModel::Kind::General: {
            out["kind"] = "general";
            std::vector<std::vector<double>> rows(corr.n());
            for (int i = 0; i < corr.n(); ++i) {
                rows[i].resize(corr.n());
                for (int j = 0; j < corr.n(); ++j) rows[i][j] = corr.matrix()(i, j);
            }
            out["matrix"] = rows;
            break;
        }
    }
    return out;
}

json warnings_to_json(const EngineWarnings& warnings) {
    json out;
    out["clamped_rho"] = warnings.clamped_rho;
    out["iid_fallback"] = warnings.iid_fallback;
    out["underflow"] = warnings.underflow;
    return out;
}

json make_manifest(const std::string& command, std::uint64_t seed, double wall_seconds,
                   const EngineWarnings& warnings) {
    json m;
    m["command"] = command;
    m["seed"] = seed;
    m["library_version"] = GGOF_VERSION;
    m["wall_time_s"] = wall_seconds;
    m["warnings"] = warnings_to_json(warnings);
    return m;
}

void write_json(const std::string& path, const json& doc) {
    if (path.empty() || path == "-") {
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw IoError("cannot parse '" + path + "': " + e.what());
    }
    return doc;
}

bool contains_nan(const json& doc) {
    if (doc.is_number_float()) return std::isnan(doc.get<double>());
    if (doc.is_array() || doc.is_object()) {
        for (const json& child : doc) {
            if (contains_nan(child)) return true;
        }
    }
    return false;
}

}  // namespace ggof::cli
