#include "cplap/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace cplap {

namespace fs = std::filesystem;

std::string fmt_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

Json admissibility_json(const AdmissibilityReport& rep) {
  return Json{{"schema_version", 1},
              {"ell_margin", rep.ell_margin},
              {"ell2_margin", rep.ell2_margin},
              {"upper_margin", rep.upper_margin},
              {"s_star", rep.s_star},
              {"pass", rep.pass},
              {"points_checked", rep.points_checked},
              {"sampled", true},
              {"p", rep.p}};
}

Json solve_report_json(const SolveReport& rep) {
  return Json{{"schema_version", 1},
              {"iterations",
               Json{{"picard", rep.picard_iterations}, {"newton", rep.newton_iterations}}},
              {"residual_history", rep.residual_history},
              {"energy", rep.energy},
              {"energy_bound_ratio", rep.energy_bound_ratio},
              {"converged", rep.converged},
              {"degenerate_cells", rep.degenerate_cells},
              {"admissibility_overridden", rep.admissibility_overridden},
              {"monotonicity",
               Json{{"lhs", rep.monotonicity_lhs}, {"rhs", rep.monotonicity_rhs}}}};
}

Json c3_json(const C3SearchReport& rep) {
  return Json{{"p", rep.p},         {"eps", rep.eps},
              {"samples", rep.samples}, {"ratio_min", rep.ratio_min},
              {"ratio_max", rep.ratio_max}, {"c3", rep.c3}};
}

void write_residual_history_csv(const fs::path& path,
                                const std::vector<double>& history) {
  std::string csv = "step,residual_sup\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    csv += std::to_string(i) + "," + fmt_g17(history[i]) + "\n";
  write_text(path, csv);
}

SolverConfig solver_config_of(const ExperimentConfig& cfg) {
  SolverConfig sc;
  sc.tol = cfg.run.tol;
  sc.max_picard = cfg.run.max_picard;
  sc.max_newton = cfg.run.max_newton;
  sc.damping = cfg.run.damping;
  sc.switch_threshold = cfg.run.switch_threshold;
  sc.allow_singular_floor = cfg.problem.allow_singular_floor;
  sc.require_admissible = !cfg.problem.allow_inadmissible;
  return sc;
}

struct Summary {
  Json checks = Json::array();
  void add(const std::string& name, bool pass, const Json& detail = {}) {
    Json c{{"name", name}, {"pass", pass}};
    if (!detail.is_null()) c["detail"] = detail;
    checks.push_back(c);
  }
  void write(const fs::path& dir, const std::string& kind, int exit_code,
             const std::string& error = {}) const {
    Json j{{"schema_version", 1},
           {"kind", kind},
           {"checks", checks},
           {"exit_code", exit_code}};
    if (!error.empty()) j["error"] = error;
    write_json(dir / "summary.json", j);
  }
};

// ---------------------------------------------------------------------------
// solve

int run_solve(const ExperimentConfig& cfg, const fs::path& dir, Summary& sum) {
  GridPtr grid = cfg.make_grid_ptr();
  const CoefficientField a = cfg.coefficient_field();
  const AdmissibilityReport adm = check_admissible(a, *grid, cfg.problem.p);
  write_json(dir / "admissibility.json", admissibility_json(adm));
  sum.add("admissible", adm.pass || cfg.problem.allow_inadmissible,
          admissibility_json(adm));

  DirichletProblem prob{grid, a, cfg.flux_params(), cfg.source_field(),
                        cfg.boundary_data(), cfg.problem.N};
  SolverConfig sc = solver_config_of(cfg);
  try {
    auto [u, rep] = solve_dirichlet(prob, sc);
    write_solution_csv(u, (dir / "solution.csv").string());
    write_json(dir / "solve_report.json", solve_report_json(rep));
    write_residual_history_csv(dir / "residual_history.csv", rep.residual_history);
    sum.add("converged", rep.converged,
            Json{{"final_residual", rep.residual_history.back()}});
    return 0;
  } catch (const SolveFailure& e) {
    write_json(dir / "solve_report.json", solve_report_json(e.report));
    write_residual_history_csv(dir / "residual_history.csv",
                               e.report.residual_history);
    sum.add("converged", false, Json{{"error", e.what()}});
    return static_cast<int>(ExitCode::NonConvergence);
  }
}

// ---------------------------------------------------------------------------
// structure-test

int run_structure_test(const ExperimentConfig& cfg, const fs::path& dir,
                       Summary& sum) {
  const std::uint64_t seed = *cfg.run.seed;
  const std::size_t N = static_cast<std::size_t>(cfg.run.mat_rows);
  const std::size_t n = static_cast<std::size_t>(cfg.run.mat_cols);

  Json combos = Json::array();
  Json c3_fixture = Json::array();
  Json first_violation;
  long total_violations = 0;

  for (std::size_t pi = 0; pi < cfg.run.p_list.size(); ++pi) {
    for (std::size_t ei = 0; ei < cfg.run.eps_list.size(); ++ei) {
      const FluxParams params{cfg.run.p_list[pi], cfg.run.eps_list[ei]};
      const std::uint64_t combo_seed = seed + 1000003ULL * pi + 7919ULL * ei;
      const C3SearchReport c3 =
          c3_search(params, std::max(cfg.run.samples, 1000L), combo_seed + 1, N, n);
      c3_fixture.push_back(c3_json(c3));

      long v_id = 0, v_str1 = 0, v_str2 = 0, v_str3 = 0;
      std::mt19937_64 rng(combo_seed);
      for (long k = 0; k < cfg.run.samples; ++k) {
        auto [F, G] = sample_structure_pair(rng, N, n, k);
        const CMat dA = flux(params, F) - flux(params, G);
        const CMat dFG = F - G;
        const Complex pair = cinner(dA, dFG);
        const double scale = cnorm(dA) * cnorm(dFG) + 1e-300;

        // realified identity
        const RealMat2N hA = hat(dA);
        const double rhs_re = hA.dot(hat(dFG));
        const double rhs_im = hA.dot(check(dFG));
        const bool ok_id = std::abs(pair.real() - rhs_re) <= 1e-12 * scale &&
                           std::abs(pair.imag() - rhs_im) <= 1e-12 * scale;

        const double gap1 = lower_gap(params, F, G);
        const bool ok1 = pair.real() >= gap1 - 1e-12 * std::max(gap1, scale);

        const double gap2 = lipschitz_gap(params, F, G);
        const bool ok2 = cnorm(dA) <= gap2 + 1e-12 * std::max(gap2, cnorm(dA));

        bool ok3 = true;
        const double denom = degenerate_weight(params.eps, F.norm2() + G.norm2(),
                                               0.5 * (params.p - 2.0)) *
                             dFG.norm2();
        if (denom > 0.0) {
          const double ratio = (v_map(params, F) - v_map(params, G)).norm2() / denom;
          ok3 = ratio >= 1.0 / c3.c3 && ratio <= c3.c3;
        }

        v_id += !ok_id;
        v_str1 += !ok1;
        v_str2 += !ok2;
        v_str3 += !ok3;
        if ((!ok_id || !ok1 || !ok2 || !ok3) && first_violation.is_null()) {
          first_violation = Json{{"p", params.p},
                                 {"eps", params.eps},
                                 {"sample_index", k},
                                 {"F_re", F.re_plane()},
                                 {"F_im", F.im_plane()},
                                 {"G_re", G.re_plane()},
                                 {"G_im", G.im_plane()},
                                 {"failed",
                                  Json{{"str_identity", !ok_id},
                                       {"str1", !ok1},
                                       {"str2", !ok2},
                                       {"str3_band", !ok3}}}};
        }
      }
      total_violations += v_id + v_str1 + v_str2 + v_str3;
      combos.push_back(Json{{"p", params.p},
                            {"eps", params.eps},
                            {"samples", cfg.run.samples},
                            {"violations",
                             Json{{"str_identity", v_id},
                                  {"str1", v_str1},
                                  {"str2", v_str2},
                                  {"str3_band", v_str3}}},
                            {"c3", c3_json(c3)}});
    }
  }

  write_json(dir / "structure_report.json",
             Json{{"schema_version", 1},
                  {"seed", seed},
                  {"combos", combos},
                  {"total_violations", total_violations}});
  write_json(dir / "c3_fixture.json", c3_fixture);
  sum.add("structure_lemmas", total_violations == 0,
          Json{{"total_violations", total_violations}});
  if (total_violations > 0) {
    write_json(dir / "violation.json", first_violation);
    return static_cast<int>(ExitCode::InvariantViolation);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sensitivity

int run_sensitivity(const ExperimentConfig& cfg, const fs::path& dir, Summary& sum) {
  GridPtr grid = cfg.make_grid_ptr();
  const ParametricCoefficient pc = cfg.parametric_field();
  const Complex z = cfg.run.z;
  const Direction dir_theta(cfg.run.theta);

  const CoefficientField a_z = pc.slice(z);
  const AdmissibilityReport adm = check_admissible(a_z, *grid, cfg.problem.p);
  write_json(dir / "admissibility.json", admissibility_json(adm));
  if (!adm.pass && !cfg.problem.allow_inadmissible)
    throw AdmissibilityError("sensitivity: slice a(z) fails the admissibility gate");

  // declared derivative must be consistent before any rate is meaningful
  std::vector<Complex> h_list;
  for (double t : cfg.run.t_list) h_list.push_back(t * dir_theta.theta);
  const auto table = derivative_consistency(pc, z, h_list, *grid);
  Json dc = Json::array();
  bool dc_ok = true;
  for (std::size_t i = 0; i < table.size(); ++i) {
    dc.push_back(Json{{"h_re", table[i].h.real()},
                      {"h_im", table[i].h.imag()},
                      {"sup_error", table[i].sup_error}});
    if (i > 0 && table[i].sup_error > table[i - 1].sup_error * 1.05 + 1e-13)
      dc_ok = false;
  }
  if (!(table.back().sup_error <= 0.5 * table.front().sup_error + 1e-13 ||
        table.front().sup_error <= 1e-13))
    dc_ok = false;
  sum.add("derivative_consistency", dc_ok, dc);
  if (!dc_ok) {
    write_json(dir / "violation.json",
               Json{{"what", "declared derivative inconsistent with difference quotients"},
                    {"table", dc}});
    return static_cast<int>(ExitCode::InvariantViolation);
  }

  SolverConfig sc = solver_config_of(cfg);
  SensitivitySolution sol =
      solve_w_theta(grid, pc, z, dir_theta, cfg.flux_params(), cfg.source_field(),
                    cfg.problem.N, sc, cfg.run.strict);

  std::string rate_error;
  try {
    sol.rate_table = rate_test(grid, pc, z, dir_theta, cfg.run.t_list,
                               cfg.flux_params(), cfg.source_field(), cfg.problem.N,
                               sc);
  } catch (const RateTestFailure& e) {
    sol.rate_table = e.table;
    rate_error = e.what();
  }

  std::string csv = "t,err_over_t,quotient_norm\n";
  for (const auto& row : sol.rate_table)
    csv += fmt_g17(row.t) + "," + fmt_g17(row.err_over_t) + "," +
           fmt_g17(row.quotient_norm) + "\n";
  write_text(dir / "rate_table.csv", csv);
  write_solution_csv(sol.w_theta, (dir / "w_theta.csv").string());
  write_json(dir / "sensitivity_report.json",
             Json{{"schema_version", 1},
                  {"z", Json::array({z.real(), z.imag()})},
                  {"theta",
                   Json::array({dir_theta.theta.real(), dir_theta.theta.imag()})},
                  {"theta_twist",
                   Json::array(
                       {dir_theta.theta_twist.real(), dir_theta.theta_twist.imag()})},
                  {"s_star", sol.s_star},
                  {"weak_regime_only", sol.weak_regime_only},
                  {"linear_residual", sol.linear_residual},
                  {"derivative_consistency", dc}});
  sum.add("rate_monotone_decrease", rate_error.empty(),
          rate_error.empty() ? Json() : Json{{"error", rate_error}});
  return rate_error.empty() ? 0 : static_cast<int>(ExitCode::InvariantViolation);
}

// ---------------------------------------------------------------------------
// regularity

int run_regularity(const ExperimentConfig& cfg, const fs::path& dir, Summary& sum) {
  GridPtr grid = cfg.make_grid_ptr();
  const CoefficientField a = cfg.coefficient_field();
  FEFunction u;
  if (!cfg.run.input_solution.empty()) {
    u = read_solution_csv(grid, cfg.problem.N, cfg.run.input_solution);
  } else {
    const AdmissibilityReport adm = check_admissible(a, *grid, cfg.problem.p);
    write_json(dir / "admissibility.json", admissibility_json(adm));
    DirichletProblem prob{grid, a, cfg.flux_params(), cfg.source_field(),
                          cfg.boundary_data(), cfg.problem.N};
    u = solve_dirichlet(prob, solver_config_of(cfg)).first;
  }

  const ExcessProfile prof = decay_fit(u, cfg.run.center, cfg.run.radii,
                                       cfg.problem.p);
  std::string csv = "rho,excess\n";
  for (std::size_t i = 0; i < prof.radii.size(); ++i)
    csv += fmt_g17(prof.radii[i]) + "," + fmt_g17(prof.excess[i]) + "\n";
  write_text(dir / "excess_profile.csv", csv);
  write_json(dir / "fit_summary.json",
             Json{{"schema_version", 1},
                  {"center", Json::array({prof.center.x, prof.center.y})},
                  {"fitted_beta", prof.fitted_beta},
                  {"fit_r2", prof.fit_r2},
                  {"degenerate", prof.degenerate}});
  sum.add("decay_fit", prof.degenerate || prof.fitted_beta > 0.0,
          Json{{"fitted_beta", prof.fitted_beta}, {"fit_r2", prof.fit_r2}});

  if (cfg.run.compare) {
    std::string ccsv = "rho,lhs,rhs_shape,ratio,energy_ratio,alpha0\n";
    for (double rho : cfg.run.radii) {
      const ComparisonReport rep =
          compare_homogeneous(u, cfg.run.center, rho, cfg.flux_params(), a,
                              solver_config_of(cfg));
      ccsv += fmt_g17(rep.rho) + "," + fmt_g17(rep.lhs) + "," +
              fmt_g17(rep.rhs_shape) + "," + fmt_g17(rep.ratio) + "," +
              fmt_g17(rep.energy_ratio) + "," + fmt_g17(rep.alpha0) + "\n";
    }
    write_text(dir / "comparison.csv", ccsv);
  }
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// convergence-study

ConvergenceTable convergence_study(const ExperimentConfig& cfg) {
  const Json sol_block = cfg.problem.source.contains("solution")
                             ? cfg.problem.source.at("solution")
                             : Json{{"name", "sinsin"}};
  const ManufacturedSolution mf = make_manufactured(sol_block, cfg.problem.N);
  const CoefficientField a = cfg.coefficient_field();
  const FluxParams params = cfg.flux_params();
  const SourceField F = manufactured_source(mf, a, params);
  // boundary data is always the trace of the manufactured solution
  BoundaryData g = [&mf](Point x) { return mf.value(x); };

  ConvergenceTable table;
  for (int m : cfg.run.meshes) {
    GridPtr grid = make_grid({cfg.problem.grid.x[0], cfg.problem.grid.y[0]},
                             {cfg.problem.grid.x[1], cfg.problem.grid.y[1]}, {m, m});
    DirichletProblem prob{grid, a, params, F, g, cfg.problem.N};
    auto [u, rep] = solve_dirichlet(prob, solver_config_of(cfg));

    double l2 = 0.0, w12 = 0.0;
    const QuadRule& rule = QuadRule::gauss2x2();
    l2 = integrate(*grid, [&](int cell, int qp, Point x) {
      const auto exact = mf.value(x);
      double s = 0.0;
      for (int k = 0; k < cfg.problem.N; ++k)
        s += std::norm(u.value_at(cell, rule.points[qp], k) - exact[k]);
      return s;
    });
    w12 = integrate(*grid, [&](int cell, int qp, Point x) {
      return (gradient_at(u, cell, qp) - mf.gradient(x)).norm2();
    });
    ConvergenceRow row;
    row.h = grid->h(0);
    row.l2_err = std::sqrt(l2);
    row.w12_err = std::sqrt(w12);
    table.rows.push_back(row);
  }
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const double lh = std::log(table.rows[i - 1].h / table.rows[i].h);
    table.rows[i].l2_order =
        std::log(table.rows[i - 1].l2_err / table.rows[i].l2_err) / lh;
    table.rows[i].w12_order =
        std::log(table.rows[i - 1].w12_err / table.rows[i].w12_err) / lh;
    table.rows[i].has_order = true;
  }
  if (table.rows.size() < 2) {
    table.flagged_single_mesh = true;
    return table;
  }
  // least-squares slopes of log err against log h
  auto fit = [&](auto err_of) {
    double mx = 0.0, my = 0.0;
    for (const auto& r : table.rows) {
      mx += std::log(r.h);
      my += std::log(err_of(r));
    }
    mx /= table.rows.size();
    my /= table.rows.size();
    double sxx = 0.0, sxy = 0.0;
    for (const auto& r : table.rows) {
      sxx += (std::log(r.h) - mx) * (std::log(r.h) - mx);
      sxy += (std::log(r.h) - mx) * (std::log(err_of(r)) - my);
    }
    return sxy / sxx;
  };
  table.l2_order_fit = fit([](const ConvergenceRow& r) { return r.l2_err; });
  table.w12_order_fit = fit([](const ConvergenceRow& r) { return r.w12_err; });
  return table;
}

namespace {

int run_convergence(const ExperimentConfig& cfg, const fs::path& dir, Summary& sum) {
  const ConvergenceTable table = convergence_study(cfg);
  std::string csv = table.flagged_single_mesh
                        ? "h,L2_err,W12_err\n"
                        : "h,L2_err,W12_err,L2_order,W12_order\n";
  for (const auto& r : table.rows) {
    csv += fmt_g17(r.h) + "," + fmt_g17(r.l2_err) + "," + fmt_g17(r.w12_err);
    if (!table.flagged_single_mesh)
      csv += "," + (r.has_order ? fmt_g17(r.l2_order) : std::string()) + "," +
             (r.has_order ? fmt_g17(r.w12_order) : std::string());
    csv += "\n";
  }
  write_text(dir / "convergence.csv", csv);
  write_json(dir / "study_report.json",
             Json{{"schema_version", 1},
                  {"l2_order_fit", table.l2_order_fit},
                  {"w12_order_fit", table.w12_order_fit},
                  {"flagged_single_mesh", table.flagged_single_mesh}});
  sum.add("convergence_study", true,
          Json{{"l2_order_fit", table.l2_order_fit},
               {"w12_order_fit", table.w12_order_fit},
               {"flagged_single_mesh", table.flagged_single_mesh}});
  return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  Summary sum;
  int code = 0;
  std::string error;
  try {
    cfg.validate();
    write_json(dir / "config_echo.json", cfg.echo());
    if (cfg.kind == "solve")
      code = run_solve(cfg, dir, sum);
    else if (cfg.kind == "structure-test")
      code = run_structure_test(cfg, dir, sum);
    else if (cfg.kind == "sensitivity")
      code = run_sensitivity(cfg, dir, sum);
    else if (cfg.kind == "regularity")
      code = run_regularity(cfg, dir, sum);
    else if (cfg.kind == "convergence-study")
      code = run_convergence(cfg, dir, sum);
  } catch (const ValidationError& e) {
    code = static_cast<int>(ExitCode::Validation);
    error = e.what();
  } catch (const AdmissibilityError& e) {
    code = static_cast<int>(ExitCode::Validation);
    error = e.what();
  } catch (const ResolutionError& e) {
    code = static_cast<int>(ExitCode::Validation);
    error = e.what();
  } catch (const ConditionViolatedError& e) {
    code = static_cast<int>(ExitCode::Validation);
    error = e.what();
  } catch (const SolveFailure& e) {
    code = static_cast<int>(ExitCode::NonConvergence);
    error = e.what();
    write_json(dir / "solve_report.json", solve_report_json(e.report));
  } catch (const InvariantViolation& e) {
    code = static_cast<int>(ExitCode::InvariantViolation);
    error = e.what();
    write_json(dir / "violation.json", Json{{"what", e.what()}});
  }
  sum.write(dir, cfg.kind, code, error);
  return code;
}

}  // namespace cplap
