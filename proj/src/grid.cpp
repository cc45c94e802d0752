#include "cplap/grid.hpp"

#include <cmath>

namespace cplap {

const QuadRule& QuadRule::gauss2x2() {
  static const QuadRule rule = [] {
    QuadRule r;
    const double a = 0.5 - 0.5 / std::sqrt(3.0);
    const double b = 0.5 + 0.5 / std::sqrt(3.0);
    r.points = {{a, a}, {b, a}, {a, b}, {b, b}};
    r.weights = {0.25, 0.25, 0.25, 0.25};
    return r;
  }();
  return rule;
}

RectGrid::RectGrid(std::array<double, 2> lo, std::array<double, 2> hi,
                   std::array<int, 2> cells)
    : lo_(lo), hi_(hi), cells_(cells) {
  for (int ax = 0; ax < 2; ++ax) {
    if (cells_[ax] < 1)
      throw ValidationError("RectGrid: need at least one cell per axis");
    if (!(hi_[ax] > lo_[ax]))
      throw ValidationError("RectGrid: empty interval on axis " + std::to_string(ax));
    h_[ax] = (hi_[ax] - lo_[ax]) / cells_[ax];
  }
  interior_index_.assign(num_nodes(), -1);
  interior_nodes_.reserve(num_interior());
  for (int node = 0; node < num_nodes(); ++node) {
    if (!is_boundary(node)) {
      interior_index_[node] = static_cast<int>(interior_nodes_.size());
      interior_nodes_.push_back(node);
    }
  }
}

}  // namespace cplap
