#include "cplap/sensitivity.hpp"

#include <cmath>
#include <sstream>

#include "cplap/parallel.hpp"

namespace cplap {

RealLinearSystem assemble_linearized(const RectGrid& grid, const CoefficientField& a_z,
                                     const FluxParams& params, const FEFunction& u_z,
                                     const Direction& dir,
                                     const std::function<Complex(Point)>& a_prime) {
  if (!(params.eps > 0.0))
    throw ValidationError("assemble_linearized: eps > 0 required");
  const int ncomp = u_z.ncomp();
  const QuadRule& rule = QuadRule::gauss2x2();
  const double area = grid.cell_area();
  const int ndof = 2 * ncomp * grid.num_interior();
  const double half_pm2 = 0.5 * (params.p - 2.0);

  RealLinearSystem sys;
  sys.b = Eigen::VectorXd::Zero(ndof);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(grid.num_cells()) * 16 * ncomp * ncomp * 4);

  for (int cell = 0; cell < grid.num_cells(); ++cell) {
    const auto nodes = grid.cell_nodes(cell);
    for (int q = 0; q < static_cast<int>(rule.points.size()); ++q) {
      const auto s = shape_eval(grid, rule.points[q]);
      const double w = rule.weights[q] * area;
      const Point x = grid.physical_point(cell, rule.points[q]);
      const CMat gu = gradient_at(u_z, cell, q, rule);
      const double sarg = params.eps * params.eps + gu.norm2();
      const double mu = std::exp(half_pm2 * std::log(sarg));
      const double rho = std::exp(0.5 * (params.p - 4.0) * std::log(sarg));
      const Complex aq = a_z.evaluator(x);
      const Complex apq = a_prime(x);

      for (int j = 0; j < 4; ++j) {
        const int rj = grid.interior_index(nodes[j]);
        if (rj < 0) continue;
        for (int k = 0; k < ncomp; ++k) {
          const int row = realified_dof(rj, ncomp, k, 0);
          const Complex duk = gu.at(k, 0) * s.grad[j][0] + gu.at(k, 1) * s.grad[j][1];
          // right-hand side: -a'(z) mu <grad u, grad phi>
          const Complex rhs = -w * apq * mu * duk;
          sys.b[row] += rhs.real();
          sys.b[row + 1] += rhs.imag();

          const Complex c_pair = w * half_pm2 * rho * aq * duk;
          const Complex c_twist = dir.theta_twist * c_pair;
          for (int l = 0; l < 4; ++l) {
            const int rl = grid.interior_index(nodes[l]);
            if (rl < 0) continue;
            // frozen-weight stiffness (same-component complex block)
            {
              const double dot =
                  s.grad[l][0] * s.grad[j][0] + s.grad[l][1] * s.grad[j][1];
              const Complex c = w * aq * mu * dot;
              const int col = realified_dof(rl, ncomp, k, 0);
              trips.emplace_back(row, col, c.real());
              trips.emplace_back(row, col + 1, -c.imag());
              trips.emplace_back(row + 1, col, c.imag());
              trips.emplace_back(row + 1, col + 1, c.real());
            }
            if (params.p == 2.0) continue;
            for (int m = 0; m < ncomp; ++m) {
              const int col = realified_dof(rl, ncomp, m, 0);
              // <grad w, grad u> factor: linear in w
              const Complex t_lin = Complex(s.grad[l][0], 0) * std::conj(gu.at(m, 0)) +
                                    Complex(s.grad[l][1], 0) * std::conj(gu.at(m, 1));
              const Complex q2 = c_pair * t_lin;
              trips.emplace_back(row, col, q2.real());
              trips.emplace_back(row, col + 1, -q2.imag());
              trips.emplace_back(row + 1, col, q2.imag());
              trips.emplace_back(row + 1, col + 1, q2.real());
              // <grad u, grad w> factor: conjugate-linear in w
              const Complex t_conj =
                  gu.at(m, 0) * s.grad[l][0] + gu.at(m, 1) * s.grad[l][1];
              const Complex q3 = c_twist * t_conj;
              trips.emplace_back(row, col, q3.real());
              trips.emplace_back(row, col + 1, q3.imag());
              trips.emplace_back(row + 1, col, q3.imag());
              trips.emplace_back(row + 1, col + 1, -q3.real());
            }
          }
        }
      }
    }
  }
  sys.A.resize(ndof, ndof);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

std::pair<double, double> coercivity_witness(const RectGrid& grid,
                                             const CoefficientField& a_z,
                                             const FluxParams& params,
                                             const FEFunction& u_z,
                                             const Direction& dir,
                                             const FEFunction& w) {
  RealLinearSystem sys = assemble_linearized(grid, a_z, params, u_z, dir,
                                             [](Point) { return Complex(0, 0); });
  const Eigen::VectorXd x = interior_vector(w);
  const double quad_form = x.dot(sys.A * x);
  const double bound = integrate(grid, [&](int cell, int qp, Point xx) {
    const CMat gu = gradient_at(u_z, cell, qp);
    const CMat gw = gradient_at(w, cell, qp);
    const Complex aq = a_z.evaluator(xx);
    const double mu = degenerate_weight(params.eps, gu.norm2(), 0.5 * (params.p - 2.0));
    const double coeff =
        params.p * aq.real() - std::abs(params.p - 2.0) * std::abs(aq);
    return 0.5 * mu * coeff * gw.norm2();
  });
  return {quad_form, bound};
}

namespace {

double check_s_star(const CoefficientField& a_z, const RectGrid& grid, double p,
                    bool strict, bool& weak_only) {
  const double s_star = sensitivity_condition(a_z, grid, p);
  constexpr double slack = 1e-12;
  if (s_star >= 1.0 + slack) {
    std::ostringstream msg;
    msg << "sensitivity condition violated: s* = " << s_star
        << " >= 1; the linearized operator has no coercivity guarantee";
    throw ConditionViolatedError(msg.str());
  }
  if (strict && s_star >= 1.0 - slack) {
    std::ostringstream msg;
    msg << "sensitivity condition: s* = " << s_star
        << " is not < 1; only the weak-convergence regime applies";
    throw ConditionViolatedError(msg.str());
  }
  weak_only = s_star >= 1.0 - slack;
  return s_star;
}

}  // namespace

SensitivitySolution solve_w_theta(GridPtr grid, const ParametricCoefficient& pc,
                                  Complex z, const Direction& dir,
                                  const FluxParams& params, const SourceField& F,
                                  int ncomp, const SolverConfig& cfg, bool strict) {
  if (!(params.eps > 0.0))
    throw ValidationError("solve_w_theta: eps > 0 required");
  if (!pc.contains(z))
    throw std::domain_error("solve_w_theta: z outside the admissible region");

  const CoefficientField a_z = pc.slice(z);
  SensitivitySolution sol;
  sol.s_star = check_s_star(a_z, *grid, params.p, strict, sol.weak_regime_only);

  DirichletProblem prob{grid, a_z, params, F, zero_boundary(ncomp), ncomp};
  auto [u_z, rep] = solve_dirichlet(prob, cfg);
  if (!rep.converged)
    throw SolveFailure("solve_w_theta: state solve did not converge", rep);

  auto a_prime = [&pc, z](Point x) { return pc.derivative_evaluator(z, x); };
  RealLinearSystem sys = assemble_linearized(*grid, a_z, params, u_z, dir, a_prime);
  const Eigen::VectorXd wvec = solve_sparse(sys.A, sys.b);
  sol.linear_residual = (sys.A * wvec - sys.b).cwiseAbs().maxCoeff();

  sol.w_theta = FEFunction(grid, ncomp);
  set_interior(sol.w_theta, wvec);
  return sol;
}

FEFunction difference_quotient(GridPtr grid, const ParametricCoefficient& pc,
                               Complex z, const Direction& dir, double t,
                               const FluxParams& params, const SourceField& F,
                               int ncomp, const SolverConfig& cfg) {
  if (t == 0.0) throw ValidationError("difference_quotient: t must be nonzero");
  const Complex h = t * dir.theta;
  if (!pc.contains(z) || !pc.contains(z + h))
    throw std::domain_error("difference_quotient: z or z + t theta outside region");
  DirichletProblem at_z{grid, pc.slice(z), params, F, zero_boundary(ncomp), ncomp};
  DirichletProblem at_zh{grid, pc.slice(z + h), params, F, zero_boundary(ncomp), ncomp};
  const FEFunction u_z = solve_dirichlet(at_z, cfg).first;
  const FEFunction u_zh = solve_dirichlet(at_zh, cfg).first;
  FEFunction q = u_zh - u_z;
  q *= Complex(1.0, 0.0) / h;
  return q;
}

std::vector<RateRow> rate_test(GridPtr grid, const ParametricCoefficient& pc,
                               Complex z, const Direction& dir,
                               const std::vector<double>& t_list,
                               const FluxParams& params, const SourceField& F,
                               int ncomp, const SolverConfig& cfg) {
  if (t_list.size() < 2) throw ValidationError("rate_test: need at least two steps");
  for (std::size_t i = 0; i + 1 < t_list.size(); ++i)
    if (!(t_list[i] > t_list[i + 1] && t_list[i + 1] > 0.0))
      throw ValidationError("rate_test: t_list must be positive and decreasing");
  if (!(t_list.front() / t_list.back() >= 100.0))
    throw ValidationError("rate_test: t_list must span at least two decades");

  SensitivitySolution sol =
      solve_w_theta(grid, pc, z, dir, params, F, ncomp, cfg, /*strict=*/true);

  DirichletProblem at_z{grid, pc.slice(z), params, F, zero_boundary(ncomp), ncomp};
  const FEFunction u_z = solve_dirichlet(at_z, cfg).first;

  std::vector<RateRow> table = parallel_map<RateRow>(
      t_list.size(), [&](std::size_t i) {
        const double t = t_list[i];
        const Complex h = t * dir.theta;
        DirichletProblem at_zh{grid, pc.slice(z + h), params, F,
                               zero_boundary(ncomp), ncomp};
        const FEFunction u_zh = solve_dirichlet(at_zh, cfg).first;
        FEFunction err = u_zh - u_z;
        FEFunction quotient = err;
        quotient *= Complex(1.0, 0.0) / h;
        err -= h * sol.w_theta;
        RateRow row;
        row.t = t;
        row.err_over_t = norms(err, 2.0).w12 / t;
        row.quotient_norm = norms(quotient, 2.0).w12;
        return row;
      });

  for (std::size_t i = 0; i + 1 < table.size(); ++i) {
    const double floor_i = 10.0 * cfg.tol / table[i].t;
    const double floor_n = 10.0 * cfg.tol / table[i + 1].t;
    if (table[i].err_over_t <= floor_i || table[i + 1].err_over_t <= floor_n)
      continue;  // inside the solver-noise floor
    if (table[i + 1].err_over_t > table[i].err_over_t * (1.0 + 1e-9)) {
      std::ostringstream msg;
      msg << "rate_test: err(t)/t failed to decrease between t = " << table[i].t
          << " and t = " << table[i + 1].t << " (" << table[i].err_over_t << " -> "
          << table[i + 1].err_over_t << ") above the noise floor";
      throw RateTestFailure(msg.str(), table);
    }
  }
  return table;
}

}  // namespace cplap
