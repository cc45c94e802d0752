#include "cplap/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cplap {

namespace {

struct CellRange {
  int cx0, cx1, cy0, cy1;  // half-open cell index ranges
  int count() const { return (cx1 - cx0) * (cy1 - cy0); }
};

/// Cells fully inside the square [center - rho, center + rho]^2.
CellRange cells_inside(const RectGrid& grid, Point center, double rho) {
  const double tol = 1e-12;
  CellRange r;
  r.cx0 = static_cast<int>(std::ceil((center.x - rho - grid.lo(0)) / grid.h(0) - tol));
  r.cx1 = static_cast<int>(std::floor((center.x + rho - grid.lo(0)) / grid.h(0) + tol));
  r.cy0 = static_cast<int>(std::ceil((center.y - rho - grid.lo(1)) / grid.h(1) - tol));
  r.cy1 = static_cast<int>(std::floor((center.y + rho - grid.lo(1)) / grid.h(1) + tol));
  r.cx0 = std::max(r.cx0, 0);
  r.cy0 = std::max(r.cy0, 0);
  r.cx1 = std::min(r.cx1, grid.cells(0));
  r.cy1 = std::min(r.cy1, grid.cells(1));
  if (r.cx1 <= r.cx0 || r.cy1 <= r.cy0) {
    std::ostringstream msg;
    msg << "sub-square of half-width " << rho << " at (" << center.x << ", "
        << center.y << ") contains no full cell";
    throw ResolutionError(msg.str());
  }
  return r;
}

template <typename Fn>
void for_each_qp(const RectGrid& grid, const CellRange& r, Fn&& fn) {
  const QuadRule& rule = QuadRule::gauss2x2();
  for (int cy = r.cy0; cy < r.cy1; ++cy)
    for (int cx = r.cx0; cx < r.cx1; ++cx) {
      const int cell = grid.cell_id(cx, cy);
      for (int q = 0; q < static_cast<int>(rule.points.size()); ++q) fn(cell, q);
    }
}

CMat mean_gradient(const FEFunction& u, const CellRange& r) {
  const RectGrid& grid = u.grid();
  CMat mean(u.ncomp(), 2);
  long count = 0;
  for_each_qp(grid, r, [&](int cell, int q) {
    mean += gradient_at(u, cell, q);
    ++count;
  });
  mean *= Complex(1.0 / static_cast<double>(count), 0.0);
  return mean;
}

}  // namespace

double excess(const FEFunction& u, Point center, double rho, double p) {
  const RectGrid& grid = u.grid();
  const CellRange r = cells_inside(grid, center, rho);
  const CMat mean = mean_gradient(u, r);
  double sum = 0.0;
  long count = 0;
  for_each_qp(grid, r, [&](int cell, int q) {
    const CMat d = gradient_at(u, cell, q) - mean;
    const double d2 = d.norm2();
    sum += d2 == 0.0 ? 0.0 : std::pow(d2, 0.5 * p);
    ++count;
  });
  return sum / static_cast<double>(count);
}

ExcessProfile decay_fit(const FEFunction& u, Point center,
                        const std::vector<double>& radii, double p) {
  if (radii.size() < 4)
    throw ValidationError("decay_fit: need at least 4 radii");
  ExcessProfile prof;
  prof.center = center;
  prof.radii = radii;
  for (const double rho : radii) prof.excess.push_back(excess(u, center, rho, p));

  const double top = *std::max_element(prof.excess.begin(), prof.excess.end());
  if (top < 1e-250) {
    prof.degenerate = true;
    return prof;
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (prof.excess[i] <= 0.0) continue;
    lx.push_back(std::log(radii[i]));
    ly.push_back(std::log(prof.excess[i]));
  }
  if (lx.size() < 4)
    throw ValidationError("decay_fit: fewer than 4 radii with positive excess");
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  const double slope = sxy / sxx;
  prof.fitted_beta = slope / p;
  prof.fit_r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return prof;
}

ComparisonReport compare_homogeneous(const FEFunction& u, Point center, double rho,
                                     const FluxParams& params,
                                     const CoefficientField& a,
                                     const SolverConfig& cfg) {
  const RectGrid& grid = u.grid();
  const CellRange r = cells_inside(grid, center, rho);

  // sub-grid with the same spacing; its nodes coincide with parent nodes
  const double sx0 = grid.lo(0) + r.cx0 * grid.h(0);
  const double sx1 = grid.lo(0) + r.cx1 * grid.h(0);
  const double sy0 = grid.lo(1) + r.cy0 * grid.h(1);
  const double sy1 = grid.lo(1) + r.cy1 * grid.h(1);
  GridPtr sub = make_grid({sx0, sy0}, {sx1, sy1}, {r.cx1 - r.cx0, r.cy1 - r.cy0});
  if (sub->num_interior() == 0)
    throw ResolutionError("compare_homogeneous: sub-square has no interior node");

  const int ncomp = u.ncomp();
  // boundary data: the nodal trace of u on the sub-square ring
  BoundaryData trace = [&](Point x) {
    const int ix = static_cast<int>(std::lround((x.x - grid.lo(0)) / grid.h(0)));
    const int iy = static_cast<int>(std::lround((x.y - grid.lo(1)) / grid.h(1)));
    std::vector<Complex> vals(ncomp);
    for (int k = 0; k < ncomp; ++k) vals[k] = u.value(grid.node_id(ix, iy), k);
    return vals;
  };

  // frozen-coefficient homogeneous problem: constant unit coefficient,
  // zero source (a constant complex factor drops out of the equation)
  CoefficientField unit;
  unit.evaluator = [](Point) { return Complex(1.0, 0.0); };
  unit.nu = 0.5;
  unit.L = 2.0;
  SourceField zero;
  zero.ncomp = ncomp;
  zero.evaluator = [ncomp](Point) { return CMat(ncomp, 2); };

  DirichletProblem hom{sub, unit, params, zero, trace, ncomp};
  FEFunction v;
  try {
    v = solve_dirichlet(hom, cfg).first;
  } catch (SolveFailure&) {
    throw;
  }

  // interpolant of u on the sub-grid: nodal values coincide, so gradients
  // at matching quadrature points agree with the parent function
  FEFunction u_sub(sub, ncomp);
  for (int node = 0; node < sub->num_nodes(); ++node) {
    const Point x = sub->node_coord(node);
    const int ix = static_cast<int>(std::lround((x.x - grid.lo(0)) / grid.h(0)));
    const int iy = static_cast<int>(std::lround((x.y - grid.lo(1)) / grid.h(1)));
    for (int k = 0; k < ncomp; ++k)
      u_sub.set_value(node, k, u.value(grid.node_id(ix, iy), k));
  }

  const double measure = (sx1 - sx0) * (sy1 - sy0);
  double lhs = 0.0, uref = 0.0, ven = 0.0;
  lhs = integrate(*sub, [&](int cell, int qp, Point) {
    const double d2 = (gradient_at(u_sub, cell, qp) - gradient_at(v, cell, qp)).norm2();
    return d2 == 0.0 ? 0.0 : std::pow(d2, 0.5 * params.p);
  }) / measure;
  uref = integrate(*sub, [&](int cell, int qp, Point) {
    const double g2 = gradient_at(u_sub, cell, qp).norm2();
    return (g2 == 0.0 ? 0.0 : std::pow(g2, 0.5 * params.p)) + 1.0;
  }) / measure;
  ven = integrate(*sub, [&](int cell, int qp, Point) {
    const double g2 = gradient_at(v, cell, qp).norm2();
    return g2 == 0.0 ? 0.0 : std::pow(g2, 0.5 * params.p);
  }) / measure;

  ComparisonReport rep;
  rep.rho = rho;
  const double alpha = a.holder_exponent * params.p / (params.p - 1.0);
  rep.alpha0 = std::min(alpha, alpha * (params.p - 1.0));
  rep.lhs = lhs;
  rep.rhs_shape = std::pow(rho, rep.alpha0) * uref;
  rep.ratio = rep.lhs / rep.rhs_shape;
  rep.energy_ratio = ven / uref;
  return rep;
}

double grad_oscillation(const FEFunction& u, Point center, double rho) {
  const RectGrid& grid = u.grid();
  const CellRange r = cells_inside(grid, center, rho);
  const int ncomp = u.ncomp();
  std::vector<double> lo(4 * ncomp, std::numeric_limits<double>::infinity());
  std::vector<double> hi(4 * ncomp, -std::numeric_limits<double>::infinity());
  for_each_qp(grid, r, [&](int cell, int q) {
    const CMat g = gradient_at(u, cell, q);
    for (int k = 0; k < ncomp; ++k)
      for (int d = 0; d < 2; ++d) {
        const int ir = 2 * (2 * k + d), ii = ir + 1;
        lo[ir] = std::min(lo[ir], g.re(k, d));
        hi[ir] = std::max(hi[ir], g.re(k, d));
        lo[ii] = std::min(lo[ii], g.im(k, d));
        hi[ii] = std::max(hi[ii], g.im(k, d));
      }
  });
  double s = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  return std::sqrt(s);
}

}  // namespace cplap
