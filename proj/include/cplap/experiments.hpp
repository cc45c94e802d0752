#ifndef CPLAP_EXPERIMENTS_HPP
#define CPLAP_EXPERIMENTS_HPP

#include "cplap/config.hpp"
#include "cplap/regularity.hpp"
#include "cplap/sensitivity.hpp"

namespace cplap {

enum class ExitCode : int {
  Ok = 0,
  Validation = 2,
  NonConvergence = 3,
  InvariantViolation = 4,
};

struct ConvergenceRow {
  double h = 0.0;
  double l2_err = 0.0;
  double w12_err = 0.0;  // gradient L2 error
  double l2_order = 0.0;
  double w12_order = 0.0;
  bool has_order = false;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double l2_order_fit = 0.0;   // least-squares slope of log err vs log h
  double w12_order_fit = 0.0;
  bool flagged_single_mesh = false;
};

/// Manufactured-solution refinement study for the configured problem.
ConvergenceTable convergence_study(const ExperimentConfig& cfg);

/// Runs the configured experiment, writes all artifacts into
/// cfg.output_dir, and returns the process exit code.
int run_experiment(const ExperimentConfig& cfg);

/// Formats a double for CSV output (round-trip precision).
std::string fmt_g17(double v);

}  // namespace cplap

#endif
