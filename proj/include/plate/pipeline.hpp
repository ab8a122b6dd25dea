#pragma once

#include <string>

namespace plate::pipeline {

/// Full scenario pipeline: solve, transfer, membership, duality gaps,
/// primal-dual functional, case classification; writes report.csv,
/// summary.txt and field dumps under the configured output directory.
/// Returns 0 when every enabled check passes, 2 on a check failure,
/// 1 on configuration errors or solver non-convergence.
int run(const std::string& config_path, const std::string& output_root);

/// Finite-difference validation of the energy gradient and Hessian on the
/// configured grid; prints the max relative errors.  `corrupt` injects a
/// deliberate error to prove the harness can fail (self-test).
int gradcheck(const std::string& config_path, bool corrupt);

/// Re-run the pipeline across a configured parameter list
/// (epsilon | K | load_scale | grid) and emit one report row per value.
int sweep(const std::string& config_path, const std::string& parameter,
          const std::string& output_root);

}  // namespace plate::pipeline
