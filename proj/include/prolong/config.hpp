#pragma once

#include "prolong/geometry.hpp"
#include "prolong/module.hpp"
#include "prolong/report.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace prolong {

/// Tolerances with their config keys; every entry can be overridden by an
/// environment variable PROLONG_TOL_<UPPERCASE KEY>.
struct Tolerances {
  double rank_rel = 1e-10;          // SVD rank decisions in the algebra layer
  double holonomy_svd = 1e-6;       // absolute cut for ker(H - I)
  double oracle_svd_rel = 1e-8;     // collocation rank cut, relative
  double oracle_gap = 10.0;         // required singular-value gap at the cut
  double residual = 1e-6;           // FD residual bound for reconstructions
  double subspace = 1e-6;           // oracle-vs-holonomy subspace agreement
  double einstein_residual = 1e-4;  // |Ric0| bound for rescaled metrics
};

struct RunConfig {
  int n = 3;
  ModuleSpec module = ModuleSpec::scalar(2);
  MetricChart chart;                 // derived from metric.*
  LowerOrderTensor lower_order;      // zero when absent
  bool has_lower_order = false;

  Eigen::VectorXd basepoint;         // default: origin
  Eigen::VectorXd grid_center;       // default: origin
  double grid_spacing = 0.01;
  int grid_points = 25;
  std::vector<double> loop_sides = {0.4, 0.8};
  double integrator_step = 1e-3;
  std::uint64_t seed = 20240915;
  Tolerances tol;

  int oracle_degree = -1;            // -1: derived from the module (N, or 2)
  int oracle_samples = 0;            // 0: 3x trial dimension

  std::string out_dir = "out";
  std::vector<std::string> formats = {"json", "csv"};

  int derived_oracle_degree() const;
};

/// Parses and validates a config JSON document; unknown keys anywhere are
/// rejected, tolerances must be positive, and the cross-field invariants
/// (adjoint needs n >= 3; curved metrics need the scalar r = 2 module) are
/// enforced. Throws ConfigError with a descriptive message.
RunConfig parse_config_text(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Applies PROLONG_TOL_* environment overrides (used after parsing).
void apply_env_overrides(RunConfig& config);

/// The resolved config as report JSON (embedded into every report).
Json config_to_json(const RunConfig& config);

} // namespace prolong
