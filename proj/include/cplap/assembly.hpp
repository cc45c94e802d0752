#ifndef CPLAP_ASSEMBLY_HPP
#define CPLAP_ASSEMBLY_HPP

#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "cplap/coefficients.hpp"
#include "cplap/fe_function.hpp"
#include "cplap/structure.hpp"

namespace cplap {

/// Realified DOF layout on the interior nodes: for interior node k,
/// component c and part r (0 = Re, 1 = Im) the index is 2(kN + c) + r.
inline int realified_dof(int interior_node_index, int ncomp, int comp, int part) {
  return 2 * (interior_node_index * ncomp + comp) + part;
}

struct AssemblyOptions {
  /// Floor the weight argument eps^2 + |grad u|^2 at machine-eps^2 when
  /// p < 2 would otherwise make it singular. Degenerate cells are flagged.
  bool allow_singular_floor = false;
};

struct RealLinearSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  std::vector<int> degenerate_cells;
};

/// Weak residual of u against every interior test function phi_j e_k and
/// i phi_j e_k: entries are Re and Im of
///   ∫ a (eps^2+|grad u|^2)^{(p-2)/2} <grad u, grad phi> - <F, grad phi> dx.
/// Vector length 2 N (#interior). Vanishes iff u is a discrete solution.
Eigen::VectorXd assemble_residual(const RectGrid& grid, const CoefficientField& a,
                                  const FluxParams& params, const SourceField& F,
                                  const FEFunction& u,
                                  const AssemblyOptions& opts = {});

/// Lagged-weight linearization: freeze mu_k = (eps^2+|grad u_k|^2)^{(p-2)/2}
/// and assemble the complex-linear system ∫ a mu_k <grad u, grad phi> =
/// ∫ <F, grad phi> for the next full iterate. Dirichlet data is taken from
/// the boundary values of u_k and eliminated into the right-hand side.
RealLinearSystem assemble_picard_operator(const RectGrid& grid,
                                          const CoefficientField& a,
                                          const FluxParams& params,
                                          const FEFunction& u_k,
                                          const SourceField& F,
                                          const AssemblyOptions& opts = {});

/// Gateaux derivative of the flux at u:
///   dA[w] = mu grad w + (p-2)(eps^2+|grad u|^2)^{(p-4)/2} Re<grad u, grad w> grad u,
/// realified into a 2N(#interior) square operator. Real-linear only; the
/// Re<.,.> coupling mixes the Re/Im planes for p != 2.
RealLinearSystem assemble_newton_jacobian(const RectGrid& grid,
                                          const CoefficientField& a,
                                          const FluxParams& params,
                                          const FEFunction& u,
                                          const AssemblyOptions& opts = {});

/// Interior realified coefficients of u as a flat vector and back.
Eigen::VectorXd interior_vector(const FEFunction& u);
void set_interior(FEFunction& u, const Eigen::VectorXd& x);

/// Sparse LU direct solve; throws on a singular factorization.
Eigen::VectorXd solve_sparse(const Eigen::SparseMatrix<double>& A,
                             const Eigen::VectorXd& b);
Eigen::VectorXcd solve_sparse(const Eigen::SparseMatrix<Complex>& A,
                              const Eigen::VectorXcd& b);

/// Complex-route direct assembly of the weighted stiffness
/// ∫ a w(x) grad phi_l . grad phi_j (block-diagonal over components);
/// the independent route used by the p = 2 oracles.
Eigen::SparseMatrix<Complex> assemble_complex_stiffness(
    const RectGrid& grid, const CoefficientField& a, int ncomp,
    const std::function<double(int cell, int qp)>& weight = nullptr);

/// Per-quadrature-point complex source in C^{N x 2}.
using QPSource = std::function<CMat(int cell, int qp, Point x)>;

/// Load vector ∫ <G, grad phi> for interior test functions (complex rows).
Eigen::VectorXcd assemble_complex_load(const RectGrid& grid, const QPSource& G,
                                       int ncomp);

/// Moves known boundary values of u_bc to the right-hand side:
/// b <- b - A_IB g_B for the weighted stiffness used in the oracles.
Eigen::VectorXcd eliminate_boundary_complex(
    const RectGrid& grid, const CoefficientField& a, int ncomp,
    const FEFunction& u_bc, const std::function<double(int cell, int qp)>& weight = nullptr);

/// Quadrature of a scalar integrand over the whole grid.
double integrate(const RectGrid& grid,
                 const std::function<double(int cell, int qp, Point x)>& f);

}  // namespace cplap

#endif
