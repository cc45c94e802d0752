#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "cplap/families.hpp"
#include "cplap/solver.hpp"
#include "doctest.h"

using namespace cplap;

namespace {

constexpr double kPi = 3.14159265358979323846;

CoefficientField constant(Complex a, double nu = 0.01, double L = 100.0) {
  CoefficientField f;
  f.evaluator = [a](Point) { return a; };
  f.nu = nu;
  f.L = L;
  return f;
}

/// Admissible smooth fixture at p = 3: small imaginary oscillation.
CoefficientField cos_imag_small() {
  CoefficientField f;
  f.evaluator = [](Point x) { return Complex(1.0, 0.02 * std::cos(kPi * x.x)); };
  f.nu = 0.01;
  f.L = 10.0;
  f.holder_exponent = 0.5;
  f.holder_seminorm_bound = 0.1;
  return f;
}

SourceField zero_source(int ncomp) {
  SourceField F;
  F.ncomp = ncomp;
  F.evaluator = [ncomp](Point) { return CMat(ncomp, 2); };
  return F;
}

SourceField smooth_source(int ncomp, double amp = 1.0) {
  return make_source(Json{{"name", "smooth"}, {"amp", amp}}, ncomp,
                     constant({1, 0}), {2.0, 0.5}, 0.5, 1.0);
}

}  // namespace

TEST_CASE("zero data yields the zero solution immediately") {
  auto grid = make_unit_grid(8, 8);
  for (double p : {1.5, 2.0, 3.0}) {
    DirichletProblem prob{grid, constant({1.0, 0.1}), {p, 0.5}, zero_source(1),
                          zero_boundary(1), 1};
    auto [u, rep] = solve_dirichlet(prob, {});
    CHECK(rep.converged);
    CHECK(rep.picard_iterations + rep.newton_iterations <= 1);
    CHECK(norms(u, 2.0).w12 == 0.0);
  }
}

TEST_CASE("p = 2 solve matches the direct complex linear route") {
  auto grid = make_unit_grid(24, 24);
  const CoefficientField a = constant({1.0, 0.3}, 0.1, 10.0);
  const SourceField F = smooth_source(1);
  DirichletProblem prob{grid, a, {2.0, 0.0}, F, zero_boundary(1), 1};
  SolverConfig cfg;
  cfg.tol = 1e-12;
  auto [u, rep] = solve_dirichlet(prob, cfg);
  CHECK(rep.converged);

  const auto K = assemble_complex_stiffness(*grid, a, 1);
  const auto b = assemble_complex_load(
      *grid, [&](int, int, Point x) { return F.evaluator(x); }, 1);
  const Eigen::VectorXcd x = solve_sparse(K, b);
  FEFunction oracle(grid, 1);
  for (int k = 0; k < grid->num_interior(); ++k)
    oracle.set_value(grid->interior_node(k), 0, x[k]);

  CHECK(norms(u - oracle, 2.0).w12 <= 1e-10);
}

TEST_CASE("manufactured solution converges at first order in the gradient") {
  const FluxParams params{3.0, 0.5};
  const CoefficientField a = cos_imag_small();
  const ManufacturedSolution mf = make_manufactured(Json{{"name", "sinsin"}}, 1);
  const SourceField F = manufactured_source(mf, a, params);
  SolverConfig cfg;
  cfg.tol = 1e-11;
  std::vector<double> errs;
  for (int m : {8, 16, 32}) {
    auto grid = make_unit_grid(m, m);
    DirichletProblem prob{grid, a, params, F,
                          [&mf](Point x) { return mf.value(x); }, 1};
    auto [u, rep] = solve_dirichlet(prob, cfg);
    const double err = std::sqrt(integrate(*grid, [&](int cell, int qp, Point x) {
      return (gradient_at(u, cell, qp) - mf.gradient(x)).norm2();
    }));
    errs.push_back(err);
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  CHECK(order1 == doctest::Approx(1.0).epsilon(0.25));
  CHECK(order2 == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("picard fixed point reproduces the residual at the solution") {
  auto grid = make_unit_grid(16, 16);
  const FluxParams params{3.0, 0.5};
  DirichletProblem prob{grid, cos_imag_small(), params, smooth_source(1),
                        zero_boundary(1), 1};
  auto [u, rep] = solve_dirichlet(prob, {});
  const auto sys = assemble_picard_operator(*grid, prob.a, params, u, prob.F);
  const double fp = (sys.A * interior_vector(u) - sys.b).cwiseAbs().maxCoeff();
  CHECK(fp <= std::max(10.0 * rep.residual_history.back(), 1e-12));
}

TEST_CASE("residual history of accepted steps strictly decreases") {
  auto grid = make_unit_grid(16, 16);
  DirichletProblem prob{grid, cos_imag_small(), {3.0, 0.5}, smooth_source(1),
                        zero_boundary(1), 1};
  auto [u, rep] = solve_dirichlet(prob, {});
  REQUIRE(rep.residual_history.size() >= 2);
  for (std::size_t i = 1; i < rep.residual_history.size(); ++i)
    CHECK(rep.residual_history[i] < rep.residual_history[i - 1]);
  CHECK(rep.converged);
}

TEST_CASE("energy ratio: zero source gives zero, linear case stays below one") {
  auto grid = make_unit_grid(16, 16);
  DirichletProblem zero_prob{grid, constant({1.0, 0.0}, 0.9, 1.5), {2.0, 0.0},
                             zero_source(1), zero_boundary(1), 1};
  auto [u0, rep0] = solve_dirichlet(zero_prob, {});
  CHECK(energy_check(u0, zero_prob.F, 2.0) == 0.0);

  DirichletProblem lin{grid, constant({1.0, 0.0}, 0.9, 1.5), {2.0, 0.0},
                       smooth_source(1), zero_boundary(1), 1};
  auto [u, rep] = solve_dirichlet(lin, {});
  // for a = 1: ||grad u|| <= ||F||, hence the ratio is below 1
  CHECK(rep.energy_bound_ratio > 0.0);
  CHECK(rep.energy_bound_ratio < 1.0);
}

TEST_CASE("energy ratio is stable across refinement") {
  const FluxParams params{3.0, 0.5};
  const CoefficientField a = cos_imag_small();
  std::vector<double> ratios;
  for (int m : {8, 16, 32}) {
    auto grid = make_unit_grid(m, m);
    DirichletProblem prob{grid, a, params, smooth_source(1), zero_boundary(1), 1};
    auto [u, rep] = solve_dirichlet(prob, {});
    ratios.push_back(rep.energy_bound_ratio);
  }
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  CHECK(hi / lo < 1.1);
}

TEST_CASE("uniqueness probe: random initializations agree") {
  auto grid = make_unit_grid(16, 16);
  const FluxParams params{3.0, 0.5};
  DirichletProblem prob{grid, cos_imag_small(), params, smooth_source(1),
                        zero_boundary(1), 1};
  SolverConfig cfg;
  cfg.tol = 1e-11;

  std::mt19937_64 rng(4321);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<FEFunction> inits;
  inits.push_back(lift_boundary(grid, zero_boundary(1), 1));
  for (int k = 0; k < 2; ++k) {
    FEFunction f(grid, 1);
    Eigen::VectorXd x(2 * grid->num_interior());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = 0.5 * normal(rng);
    set_interior(f, x);
    inits.push_back(f);
  }
  const double dist = uniqueness_probe(prob, inits, cfg);
  CHECK(dist <= 10.0 * cfg.tol);
}

TEST_CASE("solutions rotate with a unit scalar on the data") {
  auto grid = make_unit_grid(12, 12);
  const FluxParams params{3.0, 0.5};
  const CoefficientField a = cos_imag_small();
  const SourceField F = smooth_source(1);
  const Complex rot = std::polar(1.0, 0.7);
  SourceField Frot = F;
  Frot.evaluator = [&F, rot](Point x) {
    CMat f = F.evaluator(x);
    f *= rot;
    return f;
  };
  SolverConfig cfg;
  cfg.tol = 1e-12;
  DirichletProblem prob1{grid, a, params, F, zero_boundary(1), 1};
  DirichletProblem prob2{grid, a, params, Frot, zero_boundary(1), 1};
  auto [u1, r1] = solve_dirichlet(prob1, cfg);
  auto [u2, r2] = solve_dirichlet(prob2, cfg);
  FEFunction expected = rot * u1;
  CHECK(norms(u2 - expected, 2.0).w12 <= 1e-9);
}

TEST_CASE("real data produces a real solution") {
  auto grid = make_unit_grid(12, 12);
  SourceField F = smooth_source(1);
  SourceField Freal = F;
  Freal.evaluator = [&F](Point x) {
    CMat f = F.evaluator(x);
    for (std::size_t j = 0; j < f.rows(); ++j)
      for (std::size_t d = 0; d < f.cols(); ++d) f.im(j, d) = 0.0;
    return f;
  };
  DirichletProblem prob{grid, constant({1.0, 0.0}, 0.5, 2.0), {3.0, 0.5}, Freal,
                        zero_boundary(1), 1};
  auto [u, rep] = solve_dirichlet(prob, {});
  CHECK(u.max_abs_imag() <= 1e-12);
}

TEST_CASE("monotonicity witness is recorded and nonnegative") {
  auto grid = make_unit_grid(12, 12);
  DirichletProblem prob{grid, cos_imag_small(), {3.0, 0.5}, smooth_source(1),
                        zero_boundary(1), 1};
  auto [u, rep] = solve_dirichlet(prob, {});
  CHECK(rep.monotonicity_lhs >=
        rep.monotonicity_rhs - 1e-9 * std::max(1.0, rep.monotonicity_rhs));
  CHECK(rep.monotonicity_rhs >= 0.0);
}

TEST_CASE("monotonicity witness on random pairs") {
  auto grid = make_unit_grid(8, 8);
  const CoefficientField a = cos_imag_small();
  std::mt19937_64 rng(2718);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double p : {1.5, 2.0, 3.0}) {
    const FluxParams params{p, 0.5};
    for (int it = 0; it < 5; ++it) {
      FEFunction u(grid, 1), w(grid, 1);
      Eigen::VectorXd xu(2 * grid->num_interior()), xw(2 * grid->num_interior());
      for (Eigen::Index i = 0; i < xu.size(); ++i) {
        xu[i] = normal(rng);
        xw[i] = normal(rng);
      }
      set_interior(u, xu);
      set_interior(w, xw);
      const auto [lhs, rhs] = monotonicity_witness(*grid, a, params, u, w);
      CHECK(lhs >= rhs - 1e-10 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("p < 2 with eps = 0 is refused unless the floor override is set") {
  auto grid = make_unit_grid(8, 8);
  const BoundaryData g = [](Point x) {
    return std::vector<Complex>{Complex(x.x, 0.0)};
  };
  DirichletProblem prob{grid, constant({1.0, 0.0}, 0.5, 2.0), {1.5, 0.0},
                        zero_source(1), g, 1};
  CHECK_THROWS_AS(solve_dirichlet(prob, {}), ValidationError);

  SolverConfig cfg;
  cfg.allow_singular_floor = true;
  auto [u, rep] = solve_dirichlet(prob, cfg);
  CHECK(rep.converged);
  // the affine boundary data extends to the affine function itself
  FEFunction affine = interpolate(
      grid, [](Point x) { return std::vector<Complex>{Complex(x.x, 0.0)}; }, 1);
  CHECK(norms(u - affine, 2.0).w12 <= 1e-8);
}

TEST_CASE("inadmissible coefficients are refused unless overridden") {
  auto grid = make_unit_grid(8, 8);
  DirichletProblem prob{grid, constant({1.0, 0.5}, 0.01, 2.0), {3.0, 0.5},
                        zero_source(1), zero_boundary(1), 1};
  CHECK_THROWS_AS(solve_dirichlet(prob, {}), AdmissibilityError);
  SolverConfig cfg;
  cfg.require_admissible = false;
  auto [u, rep] = solve_dirichlet(prob, cfg);
  CHECK(rep.converged);
  CHECK(rep.admissibility_overridden);
}

TEST_CASE("exhausted iteration caps raise a diagnostic with the report") {
  auto grid = make_unit_grid(12, 12);
  DirichletProblem prob{grid, cos_imag_small(), {3.0, 0.5}, smooth_source(1),
                        zero_boundary(1), 1};
  SolverConfig cfg;
  cfg.tol = 1e-300;  // unreachable
  cfg.max_picard = 1;
  cfg.max_newton = 1;
  cfg.polish = false;
  try {
    solve_dirichlet(prob, cfg);
    FAIL("expected SolveFailure");
  } catch (const SolveFailure& e) {
    CHECK(e.report.residual_history.size() >= 2);
    CHECK_FALSE(e.report.converged);
  }
}

TEST_CASE("continuity probe: z-independent family gives exactly zero columns") {
  ParametricCoefficient pc =
      make_parametric(Json{{"name", "const_z"}, {"a0_re", 1.0}, {"a0_im", 0.1}},
                      0.1, 10.0, 0.5, 1.0, Complex(0, 0), 1.0);
  auto grid = make_unit_grid(8, 8);
  const auto rows = continuity_in_z_probe(pc, Complex(0, 0),
                                          {Complex(0.1, 0), Complex(0.01, 0)},
                                          {2.0, 0.5}, smooth_source(1), grid, 1, {});
  for (const auto& row : rows) {
    CHECK(row.w12_distance_over_h == 0.0);
    CHECK(row.sup_grad_distance == 0.0);
  }
}

TEST_CASE("continuity probe: affine family at p = 2 has a stable quotient") {
  ParametricCoefficient pc = make_parametric(
      Json{{"name", "affine_z"}, {"a0_re", 1.0}, {"a1_re", 0.1}, {"a1_im", 0.05}},
      0.1, 10.0, 0.5, 1.0, Complex(0, 0), 1.0);
  auto grid = make_unit_grid(12, 12);
  SolverConfig cfg;
  cfg.tol = 1e-12;
  const auto rows = continuity_in_z_probe(
      pc, Complex(0.05, 0.0),
      {Complex(0.1, 0), Complex(0.01, 0), Complex(0.001, 0)}, {2.0, 0.5},
      smooth_source(1), grid, 1, cfg);
  double lo = 1e300, hi = 0.0;
  for (const auto& row : rows) {
    lo = std::min(lo, row.w12_distance_over_h);
    hi = std::max(hi, row.w12_distance_over_h);
  }
  CHECK(hi / lo < 1.05);
  // gradients converge uniformly as h -> 0
  CHECK(rows.back().sup_grad_distance < rows.front().sup_grad_distance);
}
