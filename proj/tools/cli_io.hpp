#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "ggof/correlation.hpp"
#include "ggof/dep_pvalue.hpp"
#include "ggof/errors.hpp"
#include "ggof/omnibus.hpp"
#include "ggof/simulation.hpp"
#include "ggof/stat_family.hpp"

namespace ggof::cli {

// Exit codes promised by the interface contract.
enum ExitCode {
    kOk = 0,
    kFailure = 1,
    kDimensionMismatch = 2,
    kNotPositiveDefinite = 3,
    kUnreadableFile = 4,
};

// Thrown when an input file cannot be read or parsed.
class IoError : public Error {
public:
    using Error::Error;
};

// Log level from GGOF_LOG: silent | info | debug (default info).
int log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

// Vectors are single-column CSV, matrices headerless row-major CSV.
std::vector<double> read_vector_csv(const std::string& path);
Eigen::MatrixXd read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

// "identity:N" | "equal:RHO:N" | "poly:GAMMA:N" | "exp:GAMMA:N" | matrix file.
// n_hint resolves specs that omit N.
CorrelationModel parse_correlation(const std::string& spec, int n_hint);

StatFamily parse_family(const std::string& name, double s, double family_alpha);
Method parse_method(const std::string& name);
Sidedness parse_sided(const std::string& name);

// Omnibus grid from "default" or a JSON file {"s":[...],"k0":[...],"k1":[...]}.
AdaptationGrid parse_grid(const std::string& spec, int n);

// Study configuration document (schema_version "1").
StudyConfig parse_study_config(const std::string& path);

nlohmann::json correlation_to_json(const CorrelationModel& corr);
nlohmann::json warnings_to_json(const EngineWarnings& warnings);

// Manifest skeleton: command, seed, version, wall time, warnings.
nlohmann::json make_manifest(const std::string& command, std::uint64_t seed,
                             double wall_seconds, const EngineWarnings& warnings);

void write_json(const std::string& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::string& path);

// True when any numeric leaf of the document is NaN (exit code 0 forbids it).
bool contains_nan(const nlohmann::json& doc);

}  // namespace ggof::cli
