#pragma once

#include "prolong/config.hpp"
#include "prolong/report.hpp"

#include <string>

namespace prolong {

/// Exit-code contract shared by the commands:
///   0 success, 2 config error, 3 invariant/verification failure,
///   4 numerical instability.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInvariant = 3;
inline constexpr int kExitNumeric = 4;

/// Builds the algebra and module, runs the Hodge decomposition, the
/// differential matrices, phi ranks, the Cartan projection, and the
/// dimension-formula table; writes <out>/algebra.json.
Json cmd_algebra(const RunConfig& config, const std::string& out_dir);

/// Builds the closed system for the configured chart/module, computes the
/// holonomy solution space, reconstructs the first basis solution over the
/// grid, and writes <out>/prolong.json (+ residuals.csv).
Json cmd_prolong(const RunConfig& config, const std::string& out_dir);

/// Runs the collocation verifier alone; writes <out>/oracle.json.
Json cmd_oracle(const RunConfig& config, const std::string& out_dir);

/// Reads a prior prolong report from the output directory, reruns the
/// oracle, and compares dimensions and subspaces (plus the Einstein
/// rescaling check on sphere runs). Writes <out>/verify.json and throws
/// InvariantError on any mismatch beyond tolerance.
Json cmd_verify(const RunConfig& config, const std::string& out_dir);

/// Maps exceptions from the commands onto the exit-code contract.
int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_override);

/// Convention notes embedded in every report.
Json convention_record();

} // namespace prolong
