#ifndef CPLAP_REGULARITY_HPP
#define CPLAP_REGULARITY_HPP

#include "cplap/solver.hpp"

namespace cplap {

/// Campanato-style excess profile over nested dyadic sub-squares with a
/// power-law fit of the decay exponent.
struct ExcessProfile {
  Point center;
  std::vector<double> radii;
  std::vector<double> excess;
  double fitted_beta = 0.0;  // log-log slope divided by p
  double fit_r2 = 0.0;
  bool degenerate = false;   // all excess at rounding level (affine data)
};

/// Mean over the sub-square of |grad u - mean grad u|^p. The sub-square
/// of half-width rho around center is the union of the mesh cells fully
/// inside it, so the quadrature domain is exact.
double excess(const FEFunction& u, Point center, double rho, double p);

/// Least-squares fit of log(excess) against log(rho) over >= 4 radii;
/// slope / p estimates the gradient Hoelder exponent.
ExcessProfile decay_fit(const FEFunction& u, Point center,
                        const std::vector<double>& radii, double p);

struct ComparisonReport {
  double rho = 0.0;
  double lhs = 0.0;        // mean over S of |grad u - grad v|^p
  double rhs_shape = 0.0;  // rho^{alpha_0} * mean over S of (|grad u|^p + 1)
  double ratio = 0.0;      // lhs / rhs_shape
  double energy_ratio = 0.0;  // mean |grad v|^p / mean (|grad u|^p + 1)
  double alpha0 = 0.0;
};

/// Solves the frozen-coefficient homogeneous problem on the sub-square
/// with boundary data u and compares gradients against the paper-shaped
/// bound rho^{alpha_0} (|grad u|^p + 1) with alpha_0 = min(alpha, alpha (p-1)).
ComparisonReport compare_homogeneous(const FEFunction& u, Point center, double rho,
                                     const FluxParams& params,
                                     const CoefficientField& a,
                                     const SolverConfig& cfg);

/// Oscillation surrogate: diagonal of the bounding box of the gradient
/// samples over the sub-square (per-component extremes, not all pairs).
double grad_oscillation(const FEFunction& u, Point center, double rho);

}  // namespace cplap

#endif
