#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sclab/growth.hpp"
#include "sclab/quadratic.hpp"

namespace sclab {

// One-particle operator plus interaction symbol.
struct Model {
  MatrixXc a;
  Symbol v{1, 0};
};

// {"A": [[..]] | {"re": [[..]], "im": [[..]]} | "A_diag": [..], "symbol": {...}}
// or {"pphi2": {"alphas": [..], "m0": m, "grid": {"k", "k_weights", "x", "x_weights", "g"}}}.
Model parse_model(const nlohmann::json& j);

struct NmaxPolicy {
  bool tail_driven = true;
  double threshold = 1e-8;  // top-sector mass allowed in every stored state
  int explicit_nmax = 0;
  int max_raises = 10;
};

struct ExperimentConfig {
  Model model;
  OneParticleVector phi0;
  std::vector<std::pair<Occupation, Complex>> psi;  // empty: vacuum
  OneParticleVector xi;                             // Hepp test vector
  double t_final = 1.0;
  std::vector<double> times;     // output times, grid points of the classical run
  std::vector<double> epsilons;  // strictly decreasing, in (0, 1]
  NmaxPolicy nmax;
  int classical_steps = kDefaultClassicalSteps;
  double krylov_tol = 1e-10;
  GrowthWeights weights;
  std::string out_dir = "results";
  int workers = 1;
  std::uint64_t seed = 1;
  nlohmann::json source;  // config as read, echoed in manifests
};

// ConfigError on any malformed or out-of-range field. Relative model paths are
// resolved against base_dir.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Normalized Psi on the given truncation.
VectorXc initial_state(const ExperimentConfig& cfg, const FockSpace& space);

struct ScalingRow {
  double epsilon = 0.0;
  double time = 0.0;
  double error = 0.0;
  double omega = 0.0;
  int nmax = 0;
  Index dim = 0;
  double tail = 0.0;
  double norm_drift = 0.0;
  bool valid = true;
};

// Least-squares line through (log eps, log error); residual is the RMS deviation.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  int points = 0;
};
LogLogFit fit_loglog(const std::vector<double>& eps, const std::vector<double>& err);

// c(t, Psi) of the explicit error bound with C = 1.
struct BoundValue {
  double time = 0.0;
  bool evaluable = false;
  double c = 0.0;
  std::string note;
};
BoundValue error_bound_constant(const ExperimentConfig& cfg, const QuadraticGenerator& gen, const VectorXc& psi,
                                double t);

struct ScalingResult {
  std::vector<ScalingRow> rows;
  std::vector<std::pair<double, LogLogFit>> fits;  // per output time, valid rows only
  std::vector<BoundValue> bounds;
  std::vector<std::pair<double, std::vector<RegularityDiagnostic>>> regularity;
  int u2_nmax = 0;
  long u2_propagations = 0;
  bool any_invalid = false;
};

/// Error of the squeezed-coherent ansatz against the full evolution for
/// every (eps, t). Trajectory and U2 are computed once and shared by the
/// eps workers.
ScalingResult run_scaling(const ExperimentConfig& cfg);
void write_scaling_csv(std::ostream& os, const ScalingResult& r);
nlohmann::json to_json(const ScalingResult& r);

struct HeppRow {
  double epsilon = 0.0;
  double time = 0.0;
  double abs_error = 0.0;
  int nmax = 0;
  bool valid = true;
};

struct HeppResult {
  std::vector<HeppRow> rows;
  std::vector<std::pair<double, bool>> decreasing;  // per output time, over valid rows
  bool any_invalid = false;
};

// |hepp_expectation - e^{i sqrt2 Re<xi, phi_t>}| per (eps, t).
HeppResult run_hepp(const ExperimentConfig& cfg);
void write_hepp_csv(std::ostream& os, const HeppResult& r);
nlohmann::json to_json(const HeppResult& r);

struct InvariantOutcome {
  std::string name;
  std::string status;  // pass | fail | skipped
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct InvariantReport {
  std::vector<InvariantOutcome> outcomes;
  bool ok() const;
};

InvariantReport run_invariants(const ExperimentConfig& cfg);
nlohmann::json to_json(const InvariantReport& r);

// Writes <stem>.json beside a result: config echo, versions, timings, summary.
void write_manifest(const std::filesystem::path& path, const ExperimentConfig& cfg, const nlohmann::json& summary,
                    double seconds);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sclab
