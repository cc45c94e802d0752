#ifndef CPLAP_COEFFICIENTS_HPP
#define CPLAP_COEFFICIENTS_HPP

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "cplap/complex_mat.hpp"
#include "cplap/grid.hpp"

namespace cplap {

/// Complex scalar coefficient a(x) with its ellipticity box [nu, L] and
/// Hoelder metadata. Evaluators must be pure: same x -> same value.
struct CoefficientField {
  std::function<Complex(Point)> evaluator;
  double nu = 0.0;
  double L = 0.0;
  double holder_exponent = 0.5;       // the alpha/p' exponent of the data class
  double holder_seminorm_bound = 0.0; // declared bound, checked empirically
};

/// Matrix-valued source F(x) in C^{N x 2}.
struct SourceField {
  int ncomp = 1;
  std::function<CMat(Point)> evaluator;
  double holder_exponent = 0.5;
  double holder_seminorm_bound = 0.0;
};

/// z-parametrized coefficient family a(z, x) with its complex derivative
/// a'(z)(x) and an admissible disk U = {|z - center| < radius}.
struct ParametricCoefficient {
  std::function<Complex(Complex, Point)> evaluator;
  std::function<Complex(Complex, Point)> derivative_evaluator;
  Complex region_center{0.0, 0.0};
  double region_radius = 1.0;
  double uniform_holder_bound = 0.0;
  double nu = 0.0;
  double L = 0.0;
  double holder_exponent = 0.5;

  bool contains(Complex z) const { return std::abs(z - region_center) < region_radius; }
  CoefficientField slice(Complex z) const;
};

/// Sampled verdict on the three pointwise inequalities: the two-sided
/// ellipticity box and the oscillation bound c1 a^R - c2 |a^I| > nu.
struct AdmissibilityReport {
  double ell_margin = 0.0;    // min over samples of a^R - |a^I| - nu
  double ell2_margin = 0.0;   // min of c1 a^R - c2 |a^I| - nu
  double upper_margin = 0.0;  // min of L - a^R - |a^I|
  double s_star = 0.0;        // max of (|p-2|/p) |a| / a^R
  bool pass = false;
  long points_checked = 0;
  double p = 2.0;
};

/// Evaluates the admissibility inequalities at all quadrature points and
/// grid nodes. This is a sampled check, not a proof.
AdmissibilityReport check_admissible(const CoefficientField& field,
                                     const RectGrid& grid, double p);

/// Empirical lower bound for the Hoelder seminorm [a]_exponent over a
/// deterministic multi-scale pair sample (dyadic offsets from every node,
/// nested across dyadic refinements).
double holder_seminorm_estimate(const std::function<Complex(Point)>& evaluator,
                                const RectGrid& grid, double exponent);

/// Smallest s with s a^R >= (|p-2|/p)|a| over the sample set, i.e.
/// s* = max (|p-2|/p)|a|/a^R. The linearized solve is coercive iff s* < 1.
double sensitivity_condition(const CoefficientField& field, const RectGrid& grid,
                             double p);

struct DerivativeConsistencyRow {
  Complex h;
  double sup_error = 0.0;  // sup_x |a(z+h,x) - a(z,x) - h a'(z)(x)| / |h|
};

/// Checks the declared derivative a'(z) against difference quotients in
/// the sup norm over the grid's sample points. Entries must decrease
/// toward zero for a valid family.
std::vector<DerivativeConsistencyRow> derivative_consistency(
    const ParametricCoefficient& pc, Complex z, const std::vector<Complex>& h_list,
    const RectGrid& grid);

}  // namespace cplap

#endif
