#ifndef CPLAP_FE_FUNCTION_HPP
#define CPLAP_FE_FUNCTION_HPP

#include <complex>
#include <functional>
#include <vector>

#include "cplap/complex_mat.hpp"
#include "cplap/grid.hpp"

namespace cplap {

/// Pointwise Dirichlet data: x on the boundary -> N complex components.
using BoundaryData = std::function<std::vector<Complex>(Point)>;

/// Zero boundary data for N components.
BoundaryData zero_boundary(int ncomp);

/// Complex nodal bilinear finite-element function with N components.
/// Boundary nodes carry the Dirichlet trace when the function represents
/// an element of g + W_0^{1,p}; interior nodes are the unknowns.
class FEFunction {
 public:
  FEFunction() = default;
  FEFunction(GridPtr grid, int ncomp);

  const RectGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int ncomp() const { return ncomp_; }

  Complex value(int node, int comp) const { return values_[node * ncomp_ + comp]; }
  void set_value(int node, int comp, Complex v) { values_[node * ncomp_ + comp] = v; }

  const std::vector<Complex>& values() const { return values_; }
  std::vector<Complex>& values() { return values_; }

  /// Bilinear interpolation at a reference point of a cell.
  Complex value_at(int cell, const std::array<double, 2>& ref, int comp) const;

  FEFunction& operator+=(const FEFunction& o);
  FEFunction& operator-=(const FEFunction& o);
  FEFunction& operator*=(Complex c);
  friend FEFunction operator-(FEFunction a, const FEFunction& b) { return a -= b; }
  friend FEFunction operator+(FEFunction a, const FEFunction& b) { return a += b; }
  friend FEFunction operator*(Complex c, FEFunction a) { return a *= c; }

  double max_abs_imag() const;

 private:
  GridPtr grid_;
  int ncomp_ = 0;
  std::vector<Complex> values_;  // node-major: node * ncomp + comp
};

/// Reference bilinear shape values and gradients at a reference point.
struct ShapeEval {
  std::array<double, 4> value;
  std::array<std::array<double, 2>, 4> grad;  // physical gradient, scaled by 1/h
};

ShapeEval shape_eval(const RectGrid& grid, const std::array<double, 2>& ref);

/// Gradient of f at a quadrature point of a cell, as an N x 2 complex
/// matrix (one row per component).
CMat gradient_at(const FEFunction& f, int cell, int qp,
                 const QuadRule& rule = QuadRule::gauss2x2());

struct FunctionNorms {
  double w12 = 0.0;      // (∫ |f|^2 + |grad f|^2)^{1/2}
  double lp_grad = 0.0;  // (∫ |grad f|^p)^{1/p}
  double sup_grad = 0.0; // max over quadrature points of |grad f|
};

FunctionNorms norms(const FEFunction& f, double p);

/// Nodal interpolant of g on the boundary ring, zero at interior nodes:
/// the discrete Dirichlet lifting.
FEFunction lift_boundary(GridPtr grid, const BoundaryData& g, int ncomp);

/// Nodal interpolant of an arbitrary smooth field (used by manufactured
/// solutions and test fixtures).
FEFunction interpolate(GridPtr grid,
                       const std::function<std::vector<Complex>(Point)>& field,
                       int ncomp);

/// Flat node dump: node_id,x,y,re_1..re_N,im_1..im_N per line.
void write_solution_csv(const FEFunction& f, const std::string& path);

/// Reads a dump produced by write_solution_csv onto a matching grid.
FEFunction read_solution_csv(GridPtr grid, int ncomp, const std::string& path);

}  // namespace cplap

#endif
