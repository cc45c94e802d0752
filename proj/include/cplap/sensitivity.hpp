#ifndef CPLAP_SENSITIVITY_HPP
#define CPLAP_SENSITIVITY_HPP

#include "cplap/solver.hpp"

namespace cplap {

/// Unit direction in the complex parameter plane together with its twist
/// conj(theta)/theta. The twist depends on theta only through theta^2, so
/// theta and -theta describe the same line and the same twist.
struct Direction {
  Complex theta{1.0, 0.0};
  Complex theta_twist{1.0, 0.0};

  explicit Direction(Complex t) {
    const double m = std::abs(t);
    if (!(m > 0.0) || !std::isfinite(m))
      throw ValidationError("Direction: theta must be a nonzero finite complex number");
    theta = t / m;
    theta_twist = std::conj(theta) / theta;
  }
};

struct RateRow {
  double t = 0.0;
  double err_over_t = 0.0;    // ||u(z+t th) - u(z) - t th w||_{W^{1,2}} / t
  double quotient_norm = 0.0; // ||(u(z+t th) - u(z)) / (t th)||_{W^{1,2}}
};

class RateTestFailure : public std::runtime_error {
 public:
  RateTestFailure(const std::string& what, std::vector<RateRow> t)
      : std::runtime_error(what), table(std::move(t)) {}
  std::vector<RateRow> table;
};

struct SensitivitySolution {
  FEFunction w_theta;
  double linear_residual = 0.0;
  double s_star = 0.0;
  bool weak_regime_only = false;  // s* in [1 - slack, 1]: no rate claim
  std::vector<RateRow> rate_table;
};

/// Realified system of the directional-derivative equation at a solved
/// state u_z: the frozen-weight stiffness, the complex-linear coupling
/// through <grad w, grad u>, and the conjugate-linear twist term
/// theta_twist <grad u, grad w>, tested against phi and i phi. The
/// right-hand side is -∫ a'(z) mu <grad u, grad phi>.
RealLinearSystem assemble_linearized(const RectGrid& grid, const CoefficientField& a_z,
                                     const FluxParams& params, const FEFunction& u_z,
                                     const Direction& dir,
                                     const std::function<Complex(Point)>& a_prime);

/// Quadratic form of the assembled operator on w against the coercivity
/// lower bound 0.5 ∫ (eps^2+|grad u|^2)^{(p-2)/2} (p a^R - |p-2||a|) |grad w|^2.
std::pair<double, double> coercivity_witness(const RectGrid& grid,
                                             const CoefficientField& a_z,
                                             const FluxParams& params,
                                             const FEFunction& u_z,
                                             const Direction& dir,
                                             const FEFunction& w);

/// Solves for w_theta at parameter z. strict requires s* < 1
/// (differentiability regime); otherwise s* = 1 is tolerated with the
/// weak_regime_only flag set. s* > 1 is always refused.
SensitivitySolution solve_w_theta(GridPtr grid, const ParametricCoefficient& pc,
                                  Complex z, const Direction& dir,
                                  const FluxParams& params, const SourceField& F,
                                  int ncomp, const SolverConfig& cfg,
                                  bool strict = true);

/// (u(z + t theta) - u(z)) / (t theta), a zero-boundary function.
FEFunction difference_quotient(GridPtr grid, const ParametricCoefficient& pc,
                               Complex z, const Direction& dir, double t,
                               const FluxParams& params, const SourceField& F,
                               int ncomp, const SolverConfig& cfg);

/// Sweeps t over a decreasing list spanning at least two decades and
/// tabulates err(t)/t; throws RateTestFailure if the sequence fails to
/// decrease above the 10 tol / t noise floor.
std::vector<RateRow> rate_test(GridPtr grid, const ParametricCoefficient& pc,
                               Complex z, const Direction& dir,
                               const std::vector<double>& t_list,
                               const FluxParams& params, const SourceField& F,
                               int ncomp, const SolverConfig& cfg);

}  // namespace cplap

#endif
