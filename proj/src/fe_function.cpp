#include "cplap/fe_function.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cplap {

BoundaryData zero_boundary(int ncomp) {
  return [ncomp](Point) { return std::vector<Complex>(ncomp, Complex(0, 0)); };
}

FEFunction::FEFunction(GridPtr grid, int ncomp)
    : grid_(std::move(grid)), ncomp_(ncomp) {
  if (ncomp_ < 1) throw ValidationError("FEFunction: ncomp must be >= 1");
  values_.assign(static_cast<std::size_t>(grid_->num_nodes()) * ncomp_, Complex(0, 0));
}

ShapeEval shape_eval(const RectGrid& grid, const std::array<double, 2>& ref) {
  const double xi = ref[0], eta = ref[1];
  const double hx = grid.h(0), hy = grid.h(1);
  ShapeEval s;
  s.value = {(1 - xi) * (1 - eta), xi * (1 - eta), (1 - xi) * eta, xi * eta};
  s.grad = {{{-(1 - eta) / hx, -(1 - xi) / hy},
             {(1 - eta) / hx, -xi / hy},
             {-eta / hx, (1 - xi) / hy},
             {eta / hx, xi / hy}}};
  return s;
}

Complex FEFunction::value_at(int cell, const std::array<double, 2>& ref,
                             int comp) const {
  const auto nodes = grid_->cell_nodes(cell);
  const auto s = shape_eval(*grid_, ref);
  Complex v(0, 0);
  for (int a = 0; a < 4; ++a) v += s.value[a] * value(nodes[a], comp);
  return v;
}

FEFunction& FEFunction::operator+=(const FEFunction& o) {
  if (!grid_->same_layout(o.grid()) || ncomp_ != o.ncomp_)
    throw DimensionError("FEFunction: incompatible operands");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

FEFunction& FEFunction::operator-=(const FEFunction& o) {
  if (!grid_->same_layout(o.grid()) || ncomp_ != o.ncomp_)
    throw DimensionError("FEFunction: incompatible operands");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

FEFunction& FEFunction::operator*=(Complex c) {
  for (auto& v : values_) v *= c;
  return *this;
}

double FEFunction::max_abs_imag() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

CMat gradient_at(const FEFunction& f, int cell, int qp, const QuadRule& rule) {
  const RectGrid& grid = f.grid();
  if (cell < 0 || cell >= grid.num_cells())
    throw DimensionError("gradient_at: cell index out of range");
  if (qp < 0 || qp >= static_cast<int>(rule.points.size()))
    throw DimensionError("gradient_at: quadrature point out of range");
  const auto nodes = grid.cell_nodes(cell);
  const auto s = shape_eval(grid, rule.points[qp]);
  CMat g(f.ncomp(), 2);
  for (int k = 0; k < f.ncomp(); ++k)
    for (int a = 0; a < 4; ++a) {
      const Complex v = f.value(nodes[a], k);
      g.re(k, 0) += v.real() * s.grad[a][0];
      g.re(k, 1) += v.real() * s.grad[a][1];
      g.im(k, 0) += v.imag() * s.grad[a][0];
      g.im(k, 1) += v.imag() * s.grad[a][1];
    }
  return g;
}

FunctionNorms norms(const FEFunction& f, double p) {
  const RectGrid& grid = f.grid();
  const QuadRule& rule = QuadRule::gauss2x2();
  const double area = grid.cell_area();
  double l2 = 0.0, grad2 = 0.0, gradp = 0.0, supg = 0.0;
  for (int cell = 0; cell < grid.num_cells(); ++cell) {
    for (int q = 0; q < static_cast<int>(rule.points.size()); ++q) {
      const double w = rule.weights[q] * area;
      double v2 = 0.0;
      for (int k = 0; k < f.ncomp(); ++k) {
        const Complex v = f.value_at(cell, rule.points[q], k);
        v2 += std::norm(v);
      }
      const CMat g = gradient_at(f, cell, q, rule);
      const double g2 = g.norm2();
      l2 += w * v2;
      grad2 += w * g2;
      gradp += w * (g2 == 0.0 ? 0.0 : std::pow(g2, 0.5 * p));
      supg = std::max(supg, std::sqrt(g2));
    }
  }
  FunctionNorms out;
  out.w12 = std::sqrt(l2 + grad2);
  out.lp_grad = gradp == 0.0 ? 0.0 : std::pow(gradp, 1.0 / p);
  out.sup_grad = supg;
  return out;
}

FEFunction lift_boundary(GridPtr grid, const BoundaryData& g, int ncomp) {
  FEFunction f(std::move(grid), ncomp);
  const RectGrid& gr = f.grid();
  for (int node = 0; node < gr.num_nodes(); ++node) {
    if (!gr.is_boundary(node)) continue;
    const auto vals = g(gr.node_coord(node));
    if (static_cast<int>(vals.size()) != ncomp)
      throw DimensionError("lift_boundary: boundary data has wrong component count");
    for (int k = 0; k < ncomp; ++k) f.set_value(node, k, vals[k]);
  }
  return f;
}

FEFunction interpolate(GridPtr grid,
                       const std::function<std::vector<Complex>(Point)>& field,
                       int ncomp) {
  FEFunction f(std::move(grid), ncomp);
  const RectGrid& gr = f.grid();
  for (int node = 0; node < gr.num_nodes(); ++node) {
    const auto vals = field(gr.node_coord(node));
    if (static_cast<int>(vals.size()) != ncomp)
      throw DimensionError("interpolate: field has wrong component count");
    for (int k = 0; k < ncomp; ++k) f.set_value(node, k, vals[k]);
  }
  return f;
}

void write_solution_csv(const FEFunction& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "node_id,x,y";
  for (int k = 1; k <= f.ncomp(); ++k) out << ",re_" << k;
  for (int k = 1; k <= f.ncomp(); ++k) out << ",im_" << k;
  out << "\n";
  char buf[64];
  const RectGrid& grid = f.grid();
  for (int node = 0; node < grid.num_nodes(); ++node) {
    const Point x = grid.node_coord(node);
    out << node;
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g", x.x, x.y);
    out << buf;
    for (int k = 0; k < f.ncomp(); ++k) {
      std::snprintf(buf, sizeof buf, ",%.17g", f.value(node, k).real());
      out << buf;
    }
    for (int k = 0; k < f.ncomp(); ++k) {
      std::snprintf(buf, sizeof buf, ",%.17g", f.value(node, k).imag());
      out << buf;
    }
    out << "\n";
  }
}

FEFunction read_solution_csv(GridPtr grid, int ncomp, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  FEFunction f(std::move(grid), ncomp);
  std::string line;
  std::getline(in, line);  // header
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> fields;
    while (std::getline(ss, tok, ',')) fields.push_back(std::stod(tok));
    if (static_cast<int>(fields.size()) != 3 + 2 * ncomp)
      throw ValidationError("solution dump: wrong column count in " + path);
    const int node = static_cast<int>(fields[0]);
    if (node < 0 || node >= f.grid().num_nodes())
      throw ValidationError("solution dump: node id out of range in " + path);
    for (int k = 0; k < ncomp; ++k)
      f.set_value(node, k, Complex(fields[3 + k], fields[3 + ncomp + k]));
    ++rows;
  }
  if (rows != f.grid().num_nodes())
    throw ValidationError("solution dump: node count mismatch with grid");
  return f;
}

}  // namespace cplap
