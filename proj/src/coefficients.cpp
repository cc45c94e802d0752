#include "cplap/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cplap/structure.hpp"

namespace cplap {

CoefficientField ParametricCoefficient::slice(Complex z) const {
  CoefficientField f;
  auto eval = evaluator;
  f.evaluator = [eval, z](Point x) { return eval(z, x); };
  f.nu = nu;
  f.L = L;
  f.holder_exponent = holder_exponent;
  f.holder_seminorm_bound = uniform_holder_bound;
  return f;
}

namespace {

Complex eval_checked(const std::function<Complex(Point)>& f, Point x) {
  const Complex v = f(x);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    std::ostringstream msg;
    msg << "coefficient evaluator returned non-finite value at x = (" << x.x << ", "
        << x.y << ")";
    throw EvaluationError(msg.str());
  }
  return v;
}

// Quadrature points of every cell plus all grid nodes.
template <typename Fn>
void for_each_sample_point(const RectGrid& grid, Fn&& fn) {
  const QuadRule& rule = QuadRule::gauss2x2();
  for (int cell = 0; cell < grid.num_cells(); ++cell)
    for (const auto& ref : rule.points) fn(grid.physical_point(cell, ref));
  for (int node = 0; node < grid.num_nodes(); ++node) fn(grid.node_coord(node));
}

}  // namespace

AdmissibilityReport check_admissible(const CoefficientField& field,
                                     const RectGrid& grid, double p) {
  if (grid.num_cells() == 0) throw ValidationError("check_admissible: empty grid");
  const double c1 = c1_of(p), c2 = c2_of(p);
  AdmissibilityReport rep;
  rep.p = p;
  double ell = std::numeric_limits<double>::infinity();
  double ell2 = std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  double sstar = 0.0;
  long count = 0;
  for_each_sample_point(grid, [&](Point x) {
    const Complex a = eval_checked(field.evaluator, x);
    const double aR = a.real(), aIabs = std::abs(a.imag());
    ell = std::min(ell, aR - aIabs - field.nu);
    upper = std::min(upper, field.L - aR - aIabs);
    ell2 = std::min(ell2, c1 * aR - c2 * aIabs - field.nu);
    if (aR > 0.0) sstar = std::max(sstar, (std::abs(p - 2.0) / p) * std::abs(a) / aR);
    ++count;
  });
  rep.ell_margin = ell;
  rep.ell2_margin = ell2;
  rep.upper_margin = upper;
  rep.s_star = sstar;
  rep.points_checked = count;
  rep.pass = ell > 0.0 && ell2 > 0.0 && upper > 0.0;
  return rep;
}

double holder_seminorm_estimate(const std::function<Complex(Point)>& evaluator,
                                const RectGrid& grid, double exponent) {
  if (!(exponent > 0.0 && exponent < 1.0))
    throw ValidationError("holder_seminorm_estimate: exponent must lie in (0,1)");
  const int nx = grid.cells(0), ny = grid.cells(1);
  // Dyadic offsets plus the full spans; nested across dyadic refinements.
  std::vector<int> offsets;
  for (int d = 1; d <= std::max(nx, ny); d *= 2) offsets.push_back(d);
  if (std::find(offsets.begin(), offsets.end(), nx) == offsets.end())
    offsets.push_back(nx);
  if (std::find(offsets.begin(), offsets.end(), ny) == offsets.end())
    offsets.push_back(ny);

  std::vector<Complex> vals(grid.num_nodes());
  for (int node = 0; node < grid.num_nodes(); ++node)
    vals[node] = eval_checked(evaluator, grid.node_coord(node));

  double best = 0.0;
  auto consider = [&](int ix, int iy, int jx, int jy) {
    if (jx < 0 || jx > nx || jy < 0 || jy > ny) return;
    const int a = grid.node_id(ix, iy), b = grid.node_id(jx, jy);
    const Point pa = grid.node_coord(a), pb = grid.node_coord(b);
    const double dist = std::hypot(pa.x - pb.x, pa.y - pb.y);
    if (dist == 0.0) return;
    const double ratio = std::abs(vals[a] - vals[b]) / std::pow(dist, exponent);
    best = std::max(best, ratio);
  };
  for (int iy = 0; iy <= ny; ++iy)
    for (int ix = 0; ix <= nx; ++ix)
      for (int d : offsets) {
        consider(ix, iy, ix + d, iy);
        consider(ix, iy, ix, iy + d);
        consider(ix, iy, ix + d, iy + d);
        consider(ix, iy, ix + d, iy - d);
      }
  return best;
}

double sensitivity_condition(const CoefficientField& field, const RectGrid& grid,
                             double p) {
  double sstar = 0.0;
  for_each_sample_point(grid, [&](Point x) {
    const Complex a = eval_checked(field.evaluator, x);
    if (a.real() <= 0.0) {
      std::ostringstream msg;
      msg << "sensitivity_condition: a^R <= 0 at x = (" << x.x << ", " << x.y
          << "); field violates the ellipticity box";
      throw AdmissibilityError(msg.str());
    }
    sstar = std::max(sstar, (std::abs(p - 2.0) / p) * std::abs(a) / a.real());
  });
  return sstar;
}

std::vector<DerivativeConsistencyRow> derivative_consistency(
    const ParametricCoefficient& pc, Complex z, const std::vector<Complex>& h_list,
    const RectGrid& grid) {
  if (!pc.contains(z))
    throw std::domain_error("derivative_consistency: z outside the admissible region");
  std::vector<DerivativeConsistencyRow> table;
  table.reserve(h_list.size());
  for (const Complex h : h_list) {
    if (h == Complex(0.0, 0.0))
      throw ValidationError("derivative_consistency: zero step in h_list");
    if (!pc.contains(z + h))
      throw std::domain_error("derivative_consistency: z + h outside the admissible region");
    double sup = 0.0;
    for_each_sample_point(grid, [&](Point x) {
      const Complex lhs = pc.evaluator(z + h, x) - pc.evaluator(z, x) -
                          h * pc.derivative_evaluator(z, x);
      sup = std::max(sup, std::abs(lhs));
    });
    table.push_back({h, sup / std::abs(h)});
  }
  return table;
}

}  // namespace cplap
