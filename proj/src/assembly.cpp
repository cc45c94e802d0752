#include "cplap/assembly.hpp"

#include <Eigen/SparseLU>
#include <cfloat>
#include <cmath>
#include <sstream>

namespace cplap {

namespace {

constexpr double kWeightFloor = DBL_EPSILON * DBL_EPSILON;

Complex eval_coeff(const CoefficientField& a, Point x) {
  const Complex v = a.evaluator(x);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    std::ostringstream msg;
    msg << "coefficient evaluator returned non-finite value at x = (" << x.x << ", "
        << x.y << ")";
    throw EvaluationError(msg.str());
  }
  return v;
}

/// Scratch state for one cell: corner nodes, their interior indices and
/// complex values, and the gradient of the iterate at a quadrature point.
struct CellScratch {
  std::array<int, 4> nodes;
  std::array<int, 4> interior;  // -1 on the boundary
  std::vector<Complex> vals;    // 4 x ncomp, local-node major

  void load(const RectGrid& grid, const FEFunction& u, int cell) {
    nodes = grid.cell_nodes(cell);
    const int ncomp = u.ncomp();
    vals.resize(4 * ncomp);
    for (int a = 0; a < 4; ++a) {
      interior[a] = grid.interior_index(nodes[a]);
      for (int k = 0; k < ncomp; ++k) vals[a * ncomp + k] = u.value(nodes[a], k);
    }
  }

  /// Gradient rows (per component) at the shape evaluation s.
  void gradient(const ShapeEval& s, int ncomp, std::vector<Complex>& gx,
                std::vector<Complex>& gy) const {
    gx.assign(ncomp, Complex(0, 0));
    gy.assign(ncomp, Complex(0, 0));
    for (int a = 0; a < 4; ++a)
      for (int k = 0; k < ncomp; ++k) {
        gx[k] += vals[a * ncomp + k] * s.grad[a][0];
        gy[k] += vals[a * ncomp + k] * s.grad[a][1];
      }
  }
};

double grad_norm2(const std::vector<Complex>& gx, const std::vector<Complex>& gy) {
  double s = 0.0;
  for (std::size_t k = 0; k < gx.size(); ++k) s += std::norm(gx[k]) + std::norm(gy[k]);
  return s;
}

}  // namespace

Eigen::VectorXd assemble_residual(const RectGrid& grid, const CoefficientField& a,
                                  const FluxParams& params, const SourceField& F,
                                  const FEFunction& u, const AssemblyOptions&) {
  const int ncomp = u.ncomp();
  if (F.ncomp != ncomp)
    throw DimensionError("assemble_residual: source component count mismatch");
  const QuadRule& rule = QuadRule::gauss2x2();
  const double area = grid.cell_area();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * ncomp * grid.num_interior());

  CellScratch sc;
  std::vector<Complex> gx, gy;
  for (int cell = 0; cell < grid.num_cells(); ++cell) {
    sc.load(grid, u, cell);
    for (int q = 0; q < static_cast<int>(rule.points.size()); ++q) {
      const auto s = shape_eval(grid, rule.points[q]);
      const double w = rule.weights[q] * area;
      const Point x = grid.physical_point(cell, rule.points[q]);
      sc.gradient(s, ncomp, gx, gy);
      const double s2 = grad_norm2(gx, gy);
      // flux weight, with the continuous-extension guard at the origin
      const double mu = (params.eps == 0.0 && s2 == 0.0)
                            ? 0.0
                            : degenerate_weight(params.eps, s2, 0.5 * (params.p - 2.0));
      const Complex aq = eval_coeff(a, x);
      const CMat Fq = F.evaluator(x);
      if (static_cast<int>(Fq.rows()) != ncomp || Fq.cols() != 2)
        throw DimensionError("assemble_residual: source evaluator shape mismatch");
      for (int j = 0; j < 4; ++j) {
        if (sc.interior[j] < 0) continue;
        for (int k = 0; k < ncomp; ++k) {
          const Complex du = gx[k] * s.grad[j][0] + gy[k] * s.grad[j][1];
          const Complex fsrc = Fq.at(k, 0) * s.grad[j][0] + Fq.at(k, 1) * s.grad[j][1];
          const Complex contrib = w * (aq * mu * du - fsrc);
          const int base = realified_dof(sc.interior[j], ncomp, k, 0);
          r[base] += contrib.real();
          r[base + 1] += contrib.imag();
        }
      }
    }
  }
  return r;
}

namespace {

void require_regularizable(const FluxParams& params, const AssemblyOptions& opts,
                           const char* where) {
  if (params.p < 2.0 && params.eps == 0.0 && !opts.allow_singular_floor)
    throw std::domain_error(std::string(where) +
                            ": singular weight for p < 2 with eps = 0 "
                            "(enable the floor override to proceed)");
}

/// Weight argument with the machine floor; flags truly singular points.
double floored_arg(const FluxParams& params, double s2, bool& degenerate) {
  const double s = params.eps * params.eps + s2;
  if (s < kWeightFloor) {
    if (params.p < 2.0) degenerate = true;
    return kWeightFloor;
  }
  return s;
}

}  // namespace

RealLinearSystem assemble_picard_operator(const RectGrid& grid,
                                          const CoefficientField& a,
                                          const FluxParams& params,
                                          const FEFunction& u_k,
                                          const SourceField& F,
                                          const AssemblyOptions& opts) {
  require_regularizable(params, opts, "assemble_picard_operator");
  const int ncomp = u_k.ncomp();
  const QuadRule& rule = QuadRule::gauss2x2();
  const double area = grid.cell_area();
  const int ndof = 2 * ncomp * grid.num_interior();

  RealLinearSystem sys;
  sys.b = Eigen::VectorXd::Zero(ndof);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(grid.num_cells()) * 16 * ncomp * 4);

  CellScratch sc;
  std::vector<Complex> gx, gy;
  for (int cell = 0; cell < grid.num_cells(); ++cell) {
    sc.load(grid, u_k, cell);
    bool cell_degenerate = false;
    for (int q = 0; q < static_cast<int>(rule.points.size()); ++q) {
      const auto s = shape_eval(grid, rule.points[q]);
      const double w = rule.weights[q] * area;
      const Point x = grid.physical_point(cell, rule.points[q]);
      sc.gradient(s, ncomp, gx, gy);
      const double sarg = floored_arg(params, grad_norm2(gx, gy), cell_degenerate);
      const double mu =
          params.p == 2.0 ? 1.0 : std::exp(0.5 * (params.p - 2.0) * std::log(sarg));
      const Complex aq = eval_coeff(a, x);
      const CMat Fq = F.evaluator(x);
      for (int j = 0; j < 4; ++j) {
        if (sc.interior[j] < 0) continue;
        for (int k = 0; k < ncomp; ++k) {
          const int row = realified_dof(sc.interior[j], ncomp, k, 0);
          // load rows
          const Complex fsrc = Fq.at(k, 0) * s.grad[j][0] + Fq.at(k, 1) * s.grad[j][1];
          sys.b[row] += w * fsrc.real();
          sys.b[row + 1] += w * fsrc.imag();
          // weighted stiffness, block-diagonal over components
          for (int l = 0; l < 4; ++l) {
            const double dot =
                s.grad[l][0] * s.grad[j][0] + s.grad[l][1] * s.grad[j][1];
            const Complex c = w * aq * mu * dot;
            if (sc.interior[l] >= 0) {
              const int col = realified_dof(sc.interior[l], ncomp, k, 0);
              trips.emplace_back(row, col, c.real());
              trips.emplace_back(row, col + 1, -c.imag());
              trips.emplace_back(row + 1, col, c.imag());
              trips.emplace_back(row + 1, col + 1, c.real());
            } else {
              const Complex gval = sc.vals[l * ncomp + k];  // Dirichlet value
              const Complex moved = c * gval;
              sys.b[row] -= moved.real();
              sys.b[row + 1] -= moved.imag();
            }
          }
        }
      }
    }
    if (cell_degenerate) sys.degenerate_cells.push_back(cell);
  }
  sys.A.resize(ndof, ndof);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

RealLinearSystem assemble_newton_jacobian(const RectGrid& grid,
                                          const CoefficientField& a,
                                          const FluxParams& params,
                                          const FEFunction& u,
                                          const AssemblyOptions& opts) {
  require_regularizable(params, opts, "assemble_newton_jacobian");
  const int ncomp = u.ncomp();
  const QuadRule& rule = QuadRule::gauss2x2();
  const double area = grid.cell_area();
  const int ndof = 2 * ncomp * grid.num_interior();

  RealLinearSystem sys;
  sys.b = Eigen::VectorXd::Zero(ndof);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(grid.num_cells()) * 16 * ncomp * ncomp * 4);

  CellScratch sc;
  std::vector<Complex> gx, gy;
  for (int cell = 0; cell < grid.num_cells(); ++cell) {
    sc.load(grid, u, cell);
    bool cell_degenerate = false;
    for (int q = 0; q < static_cast<int>(rule.points.size()); ++q) {
      const auto s = shape_eval(grid, rule.points[q]);
      const double w = rule.weights[q] * area;
      const Point x = grid.physical_point(cell, rule.points[q]);
      sc.gradient(s, ncomp, gx, gy);
      const double s2 = grad_norm2(gx, gy);
      const bool origin = params.eps == 0.0 && s2 == 0.0;
      const double sarg = floored_arg(params, s2, cell_degenerate);
      const double mu =
          params.p == 2.0 ? 1.0 : std::exp(0.5 * (params.p - 2.0) * std::log(sarg));
      const double rho =
          origin ? 0.0 : std::exp(0.5 * (params.p - 4.0) * std::log(sarg));
      const Complex aq = eval_coeff(a, x);
      for (int j = 0; j < 4; ++j) {
        if (sc.interior[j] < 0) continue;
        for (int k = 0; k < ncomp; ++k) {
          const int row = realified_dof(sc.interior[j], ncomp, k, 0);
          // first term: frozen-weight stiffness (complex-linear block)
          for (int l = 0; l < 4; ++l) {
            if (sc.interior[l] < 0) continue;
            const double dot =
                s.grad[l][0] * s.grad[j][0] + s.grad[l][1] * s.grad[j][1];
            const Complex c = w * aq * (mu * dot);
            const int col = realified_dof(sc.interior[l], ncomp, k, 0);
            trips.emplace_back(row, col, c.real());
            trips.emplace_back(row, col + 1, -c.imag());
            trips.emplace_back(row + 1, col, c.imag());
            trips.emplace_back(row + 1, col + 1, c.real());
          }
          if (params.p == 2.0 || origin) continue;
          // second term: kappa * Re<grad u, grad w>, with
          // kappa = (p-2) rho a (grad u)_k . grad phi_j  (complex)
          const Complex duk = gx[k] * s.grad[j][0] + gy[k] * s.grad[j][1];
          const Complex kappa = w * (params.p - 2.0) * rho * aq * duk;
          for (int l = 0; l < 4; ++l) {
            if (sc.interior[l] < 0) continue;
            for (int m = 0; m < ncomp; ++m) {
              const double gR =
                  gx[m].real() * s.grad[l][0] + gy[m].real() * s.grad[l][1];
              const double gI =
                  gx[m].imag() * s.grad[l][0] + gy[m].imag() * s.grad[l][1];
              const int col = realified_dof(sc.interior[l], ncomp, m, 0);
              trips.emplace_back(row, col, kappa.real() * gR);
              trips.emplace_back(row, col + 1, kappa.real() * gI);
              trips.emplace_back(row + 1, col, kappa.imag() * gR);
              trips.emplace_back(row + 1, col + 1, kappa.imag() * gI);
            }
          }
        }
      }
    }
    if (cell_degenerate) sys.degenerate_cells.push_back(cell);
  }
  sys.A.resize(ndof, ndof);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

Eigen::VectorXd interior_vector(const FEFunction& u) {
  const RectGrid& grid = u.grid();
  const int ncomp = u.ncomp();
  Eigen::VectorXd x(2 * ncomp * grid.num_interior());
  for (int k = 0; k < grid.num_interior(); ++k) {
    const int node = grid.interior_node(k);
    for (int c = 0; c < ncomp; ++c) {
      const Complex v = u.value(node, c);
      x[realified_dof(k, ncomp, c, 0)] = v.real();
      x[realified_dof(k, ncomp, c, 1)] = v.imag();
    }
  }
  return x;
}

void set_interior(FEFunction& u, const Eigen::VectorXd& x) {
  const RectGrid& grid = u.grid();
  const int ncomp = u.ncomp();
  if (x.size() != 2 * ncomp * grid.num_interior())
    throw DimensionError("set_interior: vector size mismatch");
  for (int k = 0; k < grid.num_interior(); ++k) {
    const int node = grid.interior_node(k);
    for (int c = 0; c < ncomp; ++c)
      u.set_value(node, c,
                  Complex(x[realified_dof(k, ncomp, c, 0)],
                          x[realified_dof(k, ncomp, c, 1)]));
  }
}

Eigen::VectorXd solve_sparse(const Eigen::SparseMatrix<double>& A,
                             const Eigen::VectorXd& b) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("sparse LU factorization failed (singular operator)");
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("sparse LU solve failed");
  return x;
}

Eigen::VectorXcd solve_sparse(const Eigen::SparseMatrix<Complex>& A,
                              const Eigen::VectorXcd& b) {
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("complex sparse LU factorization failed");
  Eigen::VectorXcd x = lu.solve(b);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("complex sparse LU solve failed");
  return x;
}

Eigen::SparseMatrix<Complex> assemble_complex_stiffness(
    const RectGrid& grid, const CoefficientField& a, int ncomp,
    const std::function<double(int cell, int qp)>& weight) {
  const QuadRule& rule = QuadRule::gauss2x2();
  const double area = grid.cell_area();
  const int ndof = ncomp * grid.num_interior();
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(grid.num_cells()) * 16 * ncomp);
  for (int cell = 0; cell < grid.num_cells(); ++cell) {
    const auto nodes = grid.cell_nodes(cell);
    for (int q = 0; q < static_cast<int>(rule.points.size()); ++q) {
      const auto s = shape_eval(grid, rule.points[q]);
      const double w = rule.weights[q] * area * (weight ? weight(cell, q) : 1.0);
      const Complex aq = eval_coeff(a, grid.physical_point(cell, rule.points[q]));
      for (int j = 0; j < 4; ++j) {
        const int rj = grid.interior_index(nodes[j]);
        if (rj < 0) continue;
        for (int l = 0; l < 4; ++l) {
          const int rl = grid.interior_index(nodes[l]);
          if (rl < 0) continue;
          const double dot = s.grad[l][0] * s.grad[j][0] + s.grad[l][1] * s.grad[j][1];
          for (int k = 0; k < ncomp; ++k)
            trips.emplace_back(rj * ncomp + k, rl * ncomp + k, w * aq * dot);
        }
      }
    }
  }
  Eigen::SparseMatrix<Complex> A(ndof, ndof);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

Eigen::VectorXcd assemble_complex_load(const RectGrid& grid, const QPSource& G,
                                       int ncomp) {
  const QuadRule& rule = QuadRule::gauss2x2();
  const double area = grid.cell_area();
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(ncomp * grid.num_interior());
  for (int cell = 0; cell < grid.num_cells(); ++cell) {
    const auto nodes = grid.cell_nodes(cell);
    for (int q = 0; q < static_cast<int>(rule.points.size()); ++q) {
      const auto s = shape_eval(grid, rule.points[q]);
      const double w = rule.weights[q] * area;
      const CMat Gq = G(cell, q, grid.physical_point(cell, rule.points[q]));
      for (int j = 0; j < 4; ++j) {
        const int rj = grid.interior_index(nodes[j]);
        if (rj < 0) continue;
        for (int k = 0; k < ncomp; ++k)
          b[rj * ncomp + k] +=
              w * (Gq.at(k, 0) * s.grad[j][0] + Gq.at(k, 1) * s.grad[j][1]);
      }
    }
  }
  return b;
}

Eigen::VectorXcd eliminate_boundary_complex(
    const RectGrid& grid, const CoefficientField& a, int ncomp,
    const FEFunction& u_bc, const std::function<double(int cell, int qp)>& weight) {
  const QuadRule& rule = QuadRule::gauss2x2();
  const double area = grid.cell_area();
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(ncomp * grid.num_interior());
  for (int cell = 0; cell < grid.num_cells(); ++cell) {
    const auto nodes = grid.cell_nodes(cell);
    for (int q = 0; q < static_cast<int>(rule.points.size()); ++q) {
      const auto s = shape_eval(grid, rule.points[q]);
      const double w = rule.weights[q] * area * (weight ? weight(cell, q) : 1.0);
      const Complex aq = eval_coeff(a, grid.physical_point(cell, rule.points[q]));
      for (int j = 0; j < 4; ++j) {
        const int rj = grid.interior_index(nodes[j]);
        if (rj < 0) continue;
        for (int l = 0; l < 4; ++l) {
          if (grid.interior_index(nodes[l]) >= 0) continue;
          const double dot = s.grad[l][0] * s.grad[j][0] + s.grad[l][1] * s.grad[j][1];
          for (int k = 0; k < ncomp; ++k)
            b[rj * ncomp + k] -= w * aq * dot * u_bc.value(nodes[l], k);
        }
      }
    }
  }
  return b;
}

double integrate(const RectGrid& grid,
                 const std::function<double(int cell, int qp, Point x)>& f) {
  const QuadRule& rule = QuadRule::gauss2x2();
  const double area = grid.cell_area();
  double sum = 0.0;
  for (int cell = 0; cell < grid.num_cells(); ++cell)
    for (int q = 0; q < static_cast<int>(rule.points.size()); ++q)
      sum += rule.weights[q] * area * f(cell, q, grid.physical_point(cell, rule.points[q]));
  return sum;
}

}  // namespace cplap
