#ifndef CPLAP_CONFIG_HPP
#define CPLAP_CONFIG_HPP

#include <optional>
#include <string>

#include "cplap/families.hpp"
#include "cplap/grid.hpp"

namespace cplap {

struct GridSpec {
  int nx = 32, ny = 32;
  std::array<double, 2> x{0.0, 1.0};
  std::array<double, 2> y{0.0, 1.0};
};

struct ProblemSpec {
  double p = 2.0;
  double eps = 0.5;
  int N = 1;
  GridSpec grid;
  double nu = 0.01;
  double L = 100.0;
  double holder_exponent = 0.5;
  double holder_bound = 10.0;
  Json coefficient = Json{{"name", "const"}, {"re", 1.0}, {"im", 0.0}};
  Json source = Json{{"name", "zero"}};
  Json boundary = Json{{"name", "zero"}};
  Json parametric = Json{{"name", "affine_z"},
                         {"a0_re", 1.0},
                         {"a0_im", 0.0},
                         {"a1_re", 0.1},
                         {"a1_im", 0.05},
                         {"a1_profile", "const"}};
  Complex region_center{0.0, 0.0};
  double region_radius = 1.0;
  bool allow_inadmissible = false;
  bool allow_singular_floor = false;
};

struct RunSpec {
  double tol = 1e-10;
  int max_picard = 200;
  int max_newton = 50;
  double damping = 1.0;
  double switch_threshold = 1e-3;
  std::optional<std::uint64_t> seed;
  long samples = 10000;
  std::vector<double> p_list{1.2, 1.5, 2.0, 3.0, 4.5};
  std::vector<double> eps_list{0.0, 0.1, 1.0};
  int mat_rows = 2;
  int mat_cols = 2;
  Complex z{0.0, 0.0};
  Complex theta{1.0, 0.0};
  std::vector<double> t_list{1e-1, 1e-2, 1e-3, 1e-4};
  bool strict = true;
  Point center{0.5, 0.5};
  std::vector<double> radii{0.25, 0.125, 0.0625, 0.03125, 0.015625};
  std::vector<int> meshes{8, 16, 32, 64};
  std::string input_solution;
  bool compare = false;
};

struct ExperimentConfig {
  int version = 1;
  std::string kind = "solve";
  std::string output_dir = "out";
  ProblemSpec problem;
  RunSpec run;

  /// Strict parse: unknown keys anywhere are errors.
  static ExperimentConfig parse(const Json& j);
  static ExperimentConfig load(const std::string& path);

  /// Full echo with every resolved default, for reproducibility.
  Json echo() const;

  /// Cross-field rules; throws ValidationError.
  void validate() const;

  GridPtr make_grid_ptr() const;
  CoefficientField coefficient_field() const;
  SourceField source_field() const;
  BoundaryData boundary_data() const;
  ParametricCoefficient parametric_field() const;
  FluxParams flux_params() const { return {problem.p, problem.eps}; }
};

}  // namespace cplap

#endif
