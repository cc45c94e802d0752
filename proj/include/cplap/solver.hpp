#ifndef CPLAP_SOLVER_HPP
#define CPLAP_SOLVER_HPP

#include <optional>
#include <vector>

#include "cplap/assembly.hpp"

namespace cplap {

struct SolverConfig {
  double tol = 1e-10;            // residual sup-norm target
  int max_picard = 200;
  int max_newton = 50;
  double damping = 1.0;          // initial step length; backtracking halves it
  double switch_threshold = 1e-3;  // residual level switching Picard -> Newton
  bool allow_singular_floor = false;   // p < 2, eps = 0 override
  bool require_admissible = true;      // gate on check_admissible (incl. ell2)
  bool polish = true;  // after reaching tol, take extra Newton steps to stagnation

  void validate() const {
    if (!(tol > 0.0)) throw ValidationError("SolverConfig: tol must be positive");
    if (max_picard < 1 || max_newton < 1)
      throw ValidationError("SolverConfig: iteration caps must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0))
      throw ValidationError("SolverConfig: damping must lie in (0,1]");
  }
};

struct SolveReport {
  int picard_iterations = 0;
  int newton_iterations = 0;
  std::vector<double> residual_history;  // accepted sup-norms, strictly decreasing
  double energy = 0.0;                   // ∫ |grad u_h|^p
  double energy_bound_ratio = 0.0;       // energy / ∫ (|F|^{p'} + 1)
  bool converged = false;
  int degenerate_cells = 0;
  bool admissibility_overridden = false;
  // discrete monotonicity witness between the last two accepted iterates
  double monotonicity_lhs = 0.0;
  double monotonicity_rhs = 0.0;
};

/// Non-convergence diagnostic carrying the partial report.
class SolveFailure : public std::runtime_error {
 public:
  SolveFailure(const std::string& what, SolveReport rep)
      : std::runtime_error(what), report(std::move(rep)) {}
  SolveReport report;
};

/// Invariant violation detected during a solve (exit code 4 at the CLI).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DirichletProblem {
  GridPtr grid;
  CoefficientField a;
  FluxParams params;
  SourceField F;
  BoundaryData g;  // may be empty for zero boundary data
  int ncomp = 1;
};

/// Damped Picard followed by Newton with backtracking line search on the
/// residual sup-norm. Starts from the Dirichlet lifting of g (or the
/// supplied init). Throws SolveFailure when the caps are exhausted.
std::pair<FEFunction, SolveReport> solve_dirichlet(
    const DirichletProblem& prob, const SolverConfig& cfg,
    const std::optional<FEFunction>& init = std::nullopt);

/// ∫ |grad u|^p / ∫ (|F|^{p'} + 1).
double energy_check(const FEFunction& u, const SourceField& F, double p);

/// Discrete mirror of the uniqueness energy chain:
/// lhs = Re ∫ a <A(grad u) - A(grad w), grad u - grad w>,
/// rhs = nu ∫ (eps^2+|grad u|^2+|grad w|^2)^{(p-2)/2} |grad u - grad w|^2.
std::pair<double, double> monotonicity_witness(const RectGrid& grid,
                                               const CoefficientField& a,
                                               const FluxParams& params,
                                               const FEFunction& u,
                                               const FEFunction& w);

/// Runs the solve from each init and returns the max pairwise W^{1,2}
/// distance of the results. Inits must carry the problem's boundary data.
double uniqueness_probe(const DirichletProblem& prob,
                        const std::vector<FEFunction>& inits,
                        const SolverConfig& cfg);

struct ContinuityRow {
  Complex h;
  double w12_distance_over_h = 0.0;
  double sup_grad_distance = 0.0;
};

/// Solves at z and z + h for each step and tabulates
/// ||u(z+h) - u(z)||_{W^{1,2}} / |h| and the sup-norm gradient distance.
std::vector<ContinuityRow> continuity_in_z_probe(
    const ParametricCoefficient& pc, Complex z, const std::vector<Complex>& h_list,
    const FluxParams& params, const SourceField& F, GridPtr grid, int ncomp,
    const SolverConfig& cfg);

}  // namespace cplap

#endif
