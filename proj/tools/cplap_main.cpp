// Experiment runner for the complex-coefficient p-Laplace laboratory.
//
// Usage: cplap <subcommand> [--config FILE] [overrides...]
// Subcommands: solve, structure-test, sensitivity, regularity,
// convergence-study. Flags override the corresponding config fields; a
// missing config file starts from the documented defaults.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cplap/experiments.hpp"

namespace {

using cplap::ExperimentConfig;
using cplap::Json;
using cplap::ValidationError;

/// Parses "name:k1=v1,k2=v2" into a family block. Values that parse as
/// numbers become numbers; everything else stays a string.
Json parse_family(const std::string& text) {
  Json block;
  const auto colon = text.find(':');
  block["name"] = text.substr(0, colon);
  if (colon == std::string::npos) return block;
  std::string rest = text.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    const auto comma = rest.find(',', pos);
    const std::string item = rest.substr(pos, comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ValidationError("family parameter '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      const double num = std::stod(val, &used);
      if (used == val.size())
        block[key] = num;
      else
        block[key] = val;
    } catch (...) {
      block[key] = val;
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return block;
}

struct Overrides {
  std::string config_path;
  double p = 0., eps = -1., tol = 0., nu = 0., L = 0.;
  std::string grid, out, coeff, source, boundary, family, domain;
  std::vector<double> z, theta, t_list, radii, center;
  std::uint64_t seed = 0;
  bool seed_set = false;
  long samples = 0;
  std::string input_solution;
  bool allow_inadmissible = false, allow_floor = false, no_strict = false;
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_path, "experiment config JSON");
  cmd->add_option("--p", ov.p, "flux exponent p > 1");
  cmd->add_option("--eps", ov.eps, "regularization eps in [0,1]");
  cmd->add_option("--grid", ov.grid, "cells per axis, NxM");
  cmd->add_option("--domain", ov.domain, "domain as x0,x1,y0,y1");
  cmd->add_option("--tol", ov.tol, "residual sup-norm target");
  cmd->add_option("--nu", ov.nu, "ellipticity lower constant");
  cmd->add_option("--L", ov.L, "ellipticity upper constant");
  cmd->add_option("--out", ov.out, "output directory");
  cmd->add_option("--coeff", ov.coeff, "coefficient family, name:k=v,...");
  cmd->add_option("--source", ov.source, "source family, name:k=v,...");
  cmd->add_option("--boundary", ov.boundary, "boundary family, name:k=v,...");
  cmd->add_option("--seed", ov.seed, "random seed")->each([&ov](const std::string&) {
    ov.seed_set = true;
  });
  cmd->add_flag("--allow-inadmissible", ov.allow_inadmissible,
                "proceed past a failed admissibility gate");
  cmd->add_flag("--allow-singular-floor", ov.allow_floor,
                "floor the singular weight for p < 2, eps = 0");
}

void apply(const Overrides& ov, ExperimentConfig& cfg) {
  if (ov.p > 0.) cfg.problem.p = ov.p;
  if (ov.eps >= 0.) cfg.problem.eps = ov.eps;
  if (ov.tol > 0.) cfg.run.tol = ov.tol;
  if (ov.nu > 0.) cfg.problem.nu = ov.nu;
  if (ov.L > 0.) cfg.problem.L = ov.L;
  if (!ov.out.empty()) cfg.output_dir = ov.out;
  if (!ov.grid.empty()) {
    const auto x = ov.grid.find('x');
    if (x == std::string::npos)
      throw ValidationError("--grid expects NxM, got '" + ov.grid + "'");
    cfg.problem.grid.nx = std::stoi(ov.grid.substr(0, x));
    cfg.problem.grid.ny = std::stoi(ov.grid.substr(x + 1));
  }
  if (!ov.domain.empty()) {
    double v[4];
    if (std::sscanf(ov.domain.c_str(), "%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3]) != 4)
      throw ValidationError("--domain expects x0,x1,y0,y1");
    cfg.problem.grid.x = {v[0], v[1]};
    cfg.problem.grid.y = {v[2], v[3]};
  }
  if (!ov.coeff.empty()) cfg.problem.coefficient = parse_family(ov.coeff);
  if (!ov.source.empty()) cfg.problem.source = parse_family(ov.source);
  if (!ov.boundary.empty()) cfg.problem.boundary = parse_family(ov.boundary);
  if (!ov.family.empty()) cfg.problem.parametric = parse_family(ov.family);
  if (ov.seed_set) cfg.run.seed = ov.seed;
  if (ov.samples > 0) cfg.run.samples = ov.samples;
  if (ov.z.size() == 2) cfg.run.z = {ov.z[0], ov.z[1]};
  if (ov.theta.size() == 2) cfg.run.theta = {ov.theta[0], ov.theta[1]};
  if (!ov.t_list.empty()) cfg.run.t_list = ov.t_list;
  if (!ov.radii.empty()) cfg.run.radii = ov.radii;
  if (ov.center.size() == 2) cfg.run.center = {ov.center[0], ov.center[1]};
  if (!ov.input_solution.empty()) cfg.run.input_solution = ov.input_solution;
  if (ov.allow_inadmissible) cfg.problem.allow_inadmissible = true;
  if (ov.allow_floor) cfg.problem.allow_singular_floor = true;
  if (ov.no_strict) cfg.run.strict = false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"complex-coefficient p-Laplace experiment runner"};
  app.require_subcommand(1);

  Overrides ov;
  const std::vector<std::string> kinds{"solve", "structure-test", "sensitivity",
                                       "regularity", "convergence-study"};
  for (const auto& kind : kinds) {
    CLI::App* cmd = app.add_subcommand(kind);
    add_common_flags(cmd, ov);
    if (kind == "structure-test")
      cmd->add_option("--samples", ov.samples, "sample pairs per (p, eps)");
    if (kind == "sensitivity") {
      cmd->add_option("--z", ov.z, "parameter z as re im")->expected(2);
      cmd->add_option("--theta", ov.theta, "direction theta as re im")->expected(2);
      cmd->add_option("--t-list", ov.t_list, "decreasing step sizes");
      cmd->add_option("--family", ov.family, "parametric family, name:k=v,...");
      cmd->add_flag("--no-strict", ov.no_strict,
                    "tolerate s* = 1 (weak-convergence regime)");
    }
    if (kind == "regularity") {
      cmd->add_option("--center", ov.center, "sub-square center as x y")->expected(2);
      cmd->add_option("--radii", ov.radii, "decreasing half-widths");
      cmd->add_option("--input-solution", ov.input_solution,
                      "solution dump to analyze instead of solving");
    }
  }

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    if (!ov.config_path.empty()) cfg = ExperimentConfig::load(ov.config_path);
    cfg.kind = app.get_subcommands().front()->get_name();
    apply(ov, cfg);
    const int code = cplap::run_experiment(cfg);
    if (code != 0) std::cerr << "cplap: experiment finished with exit code " << code
                             << " (see summary.json)\n";
    return code;
  } catch (const ValidationError& e) {
    std::cerr << "cplap: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "cplap: " << e.what() << "\n";
    return 1;
  }
}
