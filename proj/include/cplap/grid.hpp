#ifndef CPLAP_GRID_HPP
#define CPLAP_GRID_HPP

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "cplap/errors.hpp"

namespace cplap {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Tensor-product quadrature on the reference cell [0,1]^2.
/// Weights sum to 1 (the reference measure); physical weights scale by
/// the cell area.
struct QuadRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;

  static const QuadRule& gauss2x2();
};

/// Uniform rectangular tensor mesh on [lo_x,hi_x] x [lo_y,hi_y].
/// The spatial dimension is fixed at 2; nodes are numbered row-major,
/// cells likewise. Boundary nodes are exactly those with a coordinate
/// index on the outer ring.
class RectGrid {
 public:
  RectGrid(std::array<double, 2> lo, std::array<double, 2> hi,
           std::array<int, 2> cells);

  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  double h(int axis) const { return h_[axis]; }
  int cells(int axis) const { return cells_[axis]; }

  int num_nodes() const { return (cells_[0] + 1) * (cells_[1] + 1); }
  int num_cells() const { return cells_[0] * cells_[1]; }
  int num_interior() const { return (cells_[0] - 1) * (cells_[1] - 1); }
  double cell_area() const { return h_[0] * h_[1]; }

  int node_id(int ix, int iy) const { return iy * (cells_[0] + 1) + ix; }
  std::array<int, 2> node_multi_index(int node) const {
    return {node % (cells_[0] + 1), node / (cells_[0] + 1)};
  }
  Point node_coord(int node) const {
    const auto mi = node_multi_index(node);
    return {lo_[0] + mi[0] * h_[0], lo_[1] + mi[1] * h_[1]};
  }
  bool is_boundary(int node) const {
    const auto mi = node_multi_index(node);
    return mi[0] == 0 || mi[0] == cells_[0] || mi[1] == 0 || mi[1] == cells_[1];
  }

  /// Interior numbering: -1 for boundary nodes, else a dense index.
  int interior_index(int node) const { return interior_index_[node]; }
  int interior_node(int k) const { return interior_nodes_[k]; }

  int cell_id(int cx, int cy) const { return cy * cells_[0] + cx; }
  std::array<int, 2> cell_multi_index(int cell) const {
    return {cell % cells_[0], cell / cells_[0]};
  }
  /// Corner nodes in local order (0,0),(1,0),(0,1),(1,1).
  std::array<int, 4> cell_nodes(int cell) const {
    const auto ci = cell_multi_index(cell);
    return {node_id(ci[0], ci[1]), node_id(ci[0] + 1, ci[1]),
            node_id(ci[0], ci[1] + 1), node_id(ci[0] + 1, ci[1] + 1)};
  }
  Point cell_origin(int cell) const {
    const auto ci = cell_multi_index(cell);
    return {lo_[0] + ci[0] * h_[0], lo_[1] + ci[1] * h_[1]};
  }
  Point physical_point(int cell, const std::array<double, 2>& ref) const {
    const Point o = cell_origin(cell);
    return {o.x + ref[0] * h_[0], o.y + ref[1] * h_[1]};
  }

  bool same_layout(const RectGrid& o) const {
    return lo_ == o.lo_ && hi_ == o.hi_ && cells_ == o.cells_;
  }

 private:
  std::array<double, 2> lo_, hi_, h_;
  std::array<int, 2> cells_;
  std::vector<int> interior_index_;
  std::vector<int> interior_nodes_;
};

using GridPtr = std::shared_ptr<const RectGrid>;

inline GridPtr make_grid(std::array<double, 2> lo, std::array<double, 2> hi,
                         std::array<int, 2> cells) {
  return std::make_shared<RectGrid>(lo, hi, cells);
}

/// Unit-square grid, the default experimental domain.
inline GridPtr make_unit_grid(int nx, int ny) {
  return make_grid({0.0, 0.0}, {1.0, 1.0}, {nx, ny});
}

}  // namespace cplap

#endif
