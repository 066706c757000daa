#pragma once

// Experiment configuration, dispatch and reporting for the CLI.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "matplane/phantoms.hpp"
#include "matplane/transforms.hpp"

namespace matplane {

inline constexpr const char* kVersion = "0.1.0";

enum class Experiment {
  special_tables,
  mass_check,
  slice_check,
  fuglede,
  riesz_crosscheck,
  invert,
  reconstruct,
  noninjectivity,
  divergence,
  duality,
  phi_pairing,
  cayley_laplace
};

enum class OutputFormat { json, csv };

std::string to_string(Experiment e);
/// Throws ConfigError("experiment", ...) for unknown names.
Experiment experiment_from_string(const std::string& name);
const std::vector<Experiment>& all_experiments();

/// Experiment-specific knobs. Unset optionals take per-experiment defaults.
struct ExperimentParams {
  double alpha = 1.0;
  std::optional<double> p;            // divergence; defaults to p0
  std::optional<int> cases;           // number of random cases
  std::optional<double> tolerance;    // pass threshold on the residual
  std::vector<int> extents;           // lattice sizes
  std::optional<double> spacing;      // lattice spacing
  double epsilon = 0.3;               // witness cutoff
  int special_m = 2;                  // special_tables
  double alpha_lo = 0.5;
  double alpha_hi = 5.0;
  double alpha_step = 0.25;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::fuglede;
  Dims dims{3, 2, 1};
  PhantomSpec phantom;
  QuadraturePlan quadrature = QuadraturePlan::defaults();
  std::uint64_t seed = 0;
  std::optional<std::string> output_path;
  OutputFormat format = OutputFormat::json;
  ExperimentParams params;
  bool timing = false;

  /// Defaults for an experiment: (3,2,1) or (2,2,1) for noninjectivity.
  static ExperimentConfig defaults(Experiment e);
  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Plan with every seed replaced by `seed`.
  QuadraturePlan seeded_plan() const;
  /// Spec whose order or sample count `--budget` scales, if any.
  QuadratureSpec* budget_spec();
};

nlohmann::json config_to_json(const ExperimentConfig& c);
/// Fields absent from `j` keep their values in `base`. Throws ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base);
ExperimentConfig load_config(const std::string& path);

struct CaseRecord {
  std::string label;
  nlohmann::json inputs = nlohmann::json::object();
  cplx lhs{};
  cplx rhs{};
  double lhs_error = 0.0;
  double rhs_error = 0.0;
  double residual = 0.0;
  bool pass = false;
  std::string error;  // operation error, recorded without aborting the run
  std::string note;
  double wall_seconds = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CaseRecord> cases;
  double tolerance = 0.0;
  bool pass = false;

  nlohmann::json to_json() const;
  std::string to_csv() const;
  /// Writes to config.output_path in config.format; no-op without a path.
  void write() const;
};

/// Runs the experiment. Validates first (ConfigError); per-case operation
/// errors are recorded as failed cases.
ExperimentReport run(const ExperimentConfig& config);

struct ConvergenceRow {
  std::int64_t budget = 0;
  double residual = 0.0;
  double error_estimate = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Residuals non-increasing up to twice the reported noise; true for a
  /// single row.
  bool trend_ok = true;
  std::string to_csv() const;
};

/// Re-runs the experiment at each budget (see ExperimentConfig::budget_spec).
ConvergenceTable convergence_study(const ExperimentConfig& config,
                                   const std::vector<std::int64_t>& ladder);

/// CSV rows alpha,re,im,pole_factor for Gamma_m on lo:hi:step (inclusive).
std::string special_gamma_csv(int m, double lo, double hi, double step);

}  // namespace matplane
