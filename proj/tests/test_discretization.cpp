#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "cplap/assembly.hpp"
#include "cplap/families.hpp"
#include "doctest.h"

using namespace cplap;

namespace {

constexpr double kPi = 3.14159265358979323846;

CoefficientField constant(Complex a, double nu = 0.01, double L = 100.0) {
  CoefficientField f;
  f.evaluator = [a](Point) { return a; };
  f.nu = nu;
  f.L = L;
  return f;
}

SourceField zero_source(int ncomp) {
  SourceField F;
  F.ncomp = ncomp;
  F.evaluator = [ncomp](Point) { return CMat(ncomp, 2); };
  return F;
}

SourceField smooth_source(int ncomp) {
  SourceField F;
  F.ncomp = ncomp;
  F.evaluator = [ncomp](Point x) {
    CMat f(ncomp, 2);
    for (int k = 0; k < ncomp; ++k) {
      f.set(k, 0, Complex(std::sin(kPi * x.x), 0.3 * std::cos(kPi * x.y)) / (k + 1.0));
      f.set(k, 1, Complex(std::cos(kPi * x.x) * x.y, -0.2 * x.x) / (k + 1.0));
    }
    return f;
  };
  return F;
}

/// Maps a realified interior vector onto a zero-boundary function.
FEFunction from_interior(GridPtr grid, int ncomp, const Eigen::VectorXd& x) {
  FEFunction f(std::move(grid), ncomp);
  set_interior(f, x);
  return f;
}

Eigen::VectorXd realify(const Eigen::VectorXcd& z) {
  Eigen::VectorXd out(2 * z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    out[2 * i] = z[i].real();
    out[2 * i + 1] = z[i].imag();
  }
  return out;
}

}  // namespace

TEST_CASE("gradient of a constant function vanishes") {
  auto grid = make_unit_grid(3, 3);
  FEFunction f(grid, 1);
  for (int node = 0; node < grid->num_nodes(); ++node)
    f.set_value(node, 0, Complex(2.0, -1.0));
  for (int cell = 0; cell < grid->num_cells(); ++cell)
    for (int q = 0; q < 4; ++q) CHECK(cnorm(gradient_at(f, cell, q)) == 0.0);
}

TEST_CASE("gradient of x + i y is exact") {
  auto grid = make_grid({-1.0, 0.5}, {2.0, 3.5}, {4, 3});
  FEFunction f = interpolate(
      grid, [](Point x) { return std::vector<Complex>{Complex(x.x, x.y)}; }, 1);
  const CMat g = gradient_at(f, 5, 2);
  CHECK(g.re(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.re(0, 1) == doctest::Approx(0.0));
  CHECK(g.im(0, 0) == doctest::Approx(0.0));
  CHECK(g.im(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gradient of the bilinear x y is exact at quadrature points") {
  auto grid = make_unit_grid(5, 5);
  FEFunction f = interpolate(
      grid, [](Point x) { return std::vector<Complex>{Complex(x.x * x.y, 0.0)}; }, 1);
  const QuadRule& rule = QuadRule::gauss2x2();
  for (int cell : {0, 7, 24}) {
    for (int q = 0; q < 4; ++q) {
      const Point x = grid->physical_point(cell, rule.points[q]);
      const CMat g = gradient_at(f, cell, q);
      CHECK(g.re(0, 0) == doctest::Approx(x.y).epsilon(1e-13));
      CHECK(g.re(0, 1) == doctest::Approx(x.x).epsilon(1e-13));
    }
  }
}

TEST_CASE("gradient_at rejects out-of-range indices") {
  auto grid = make_unit_grid(2, 2);
  FEFunction f(grid, 1);
  CHECK_THROWS_AS(gradient_at(f, 99, 0), DimensionError);
  CHECK_THROWS_AS(gradient_at(f, 0, 7), DimensionError);
}

TEST_CASE("residual of the zero state with zero data vanishes") {
  auto grid = make_unit_grid(6, 6);
  FEFunction u(grid, 1);
  const Eigen::VectorXd r =
      assemble_residual(*grid, constant({1.0, 0.2}), {3.0, 0.5}, zero_source(1), u);
  CHECK(r.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("p = 2 residual matches the directly assembled complex system") {
  auto grid = make_unit_grid(7, 5);
  const int ncomp = 2;
  const CoefficientField a = constant({1.0, 0.3});
  const SourceField F = smooth_source(ncomp);
  FEFunction u = interpolate(
      grid,
      [ncomp](Point x) {
        std::vector<Complex> v(ncomp);
        for (int k = 0; k < ncomp; ++k)
          v[k] = Complex(std::sin(x.x + 0.3 * k), x.y * x.y - 0.2 * k);
        return v;
      },
      ncomp);

  const Eigen::VectorXd r = assemble_residual(*grid, a, {2.0, 0.9}, F, u);

  // independent complex route: K_II u_I - (load + boundary elimination)
  const auto K = assemble_complex_stiffness(*grid, a, ncomp);
  const auto load = assemble_complex_load(
      *grid, [&](int, int, Point x) { return F.evaluator(x); }, ncomp);
  const auto elim = eliminate_boundary_complex(*grid, a, ncomp, u);
  Eigen::VectorXcd ui(ncomp * grid->num_interior());
  for (int k = 0; k < grid->num_interior(); ++k)
    for (int c = 0; c < ncomp; ++c)
      ui[k * ncomp + c] = u.value(grid->interior_node(k), c);
  const Eigen::VectorXcd rc = K * ui - (load + elim);

  const double scale = r.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < rc.size(); ++i) {
    CHECK(std::abs(r[2 * i] - rc[i].real()) <= 1e-13 * scale);
    CHECK(std::abs(r[2 * i + 1] - rc[i].imag()) <= 1e-13 * scale);
  }
}

TEST_CASE("conjugating the data conjugates the residual") {
  auto grid = make_unit_grid(5, 5);
  const SourceField F = smooth_source(1);
  SourceField Fc = F;
  Fc.evaluator = [&F](Point x) {
    CMat f = F.evaluator(x);
    for (std::size_t j = 0; j < f.rows(); ++j)
      for (std::size_t d = 0; d < f.cols(); ++d) f.im(j, d) = -f.im(j, d);
    return f;
  };
  const CoefficientField a = constant({1.0, 0.25});
  const CoefficientField ac = constant({1.0, -0.25});
  FEFunction u = interpolate(
      grid, [](Point x) { return std::vector<Complex>{Complex(x.x * x.y, x.x - x.y)}; },
      1);
  FEFunction uc = u;
  for (auto& v : uc.values()) v = std::conj(v);

  const FluxParams params{3.0, 0.4};
  const Eigen::VectorXd r = assemble_residual(*grid, a, params, F, u);
  const Eigen::VectorXd rc = assemble_residual(*grid, ac, params, Fc, uc);
  for (int k = 0; k < grid->num_interior(); ++k) {
    CHECK(rc[2 * k] == doctest::Approx(r[2 * k]).epsilon(1e-13));
    CHECK(rc[2 * k + 1] == doctest::Approx(-r[2 * k + 1]).epsilon(1e-13));
  }
}

TEST_CASE("picard operator at p = 2 ignores the iterate") {
  auto grid = make_unit_grid(4, 4);
  const CoefficientField a = constant({1.0, 0.1});
  const SourceField F = zero_source(1);
  FEFunction u0(grid, 1);
  FEFunction u1 = interpolate(
      grid, [](Point x) { return std::vector<Complex>{Complex(x.x, -x.y)}; }, 1);
  const auto s0 = assemble_picard_operator(*grid, a, {2.0, 0.3}, u0, F);
  const auto s1 = assemble_picard_operator(*grid, a, {2.0, 0.3}, u1, F);
  CHECK((Eigen::MatrixXd(s0.A) - Eigen::MatrixXd(s1.A)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("picard operator realifies the complex weighted stiffness") {
  auto grid = make_unit_grid(5, 4);
  const CoefficientField a = constant({1.2, -0.4});
  FEFunction u0(grid, 1);  // weight 1 at eps = 1
  const auto sys = assemble_picard_operator(*grid, a, {2.0, 1.0}, u0, zero_source(1));
  const auto K = assemble_complex_stiffness(*grid, a, 1);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd x(K.rows());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = Complex(normal(rng), normal(rng));
  const Eigen::VectorXd lhs = sys.A * realify(x);
  const Eigen::VectorXd rhs = realify(K * x);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-13 * rhs.cwiseAbs().maxCoeff());
}

TEST_CASE("newton jacobian equals the picard operator at p = 2") {
  auto grid = make_unit_grid(4, 4);
  const CoefficientField a = constant({1.0, 0.2});
  FEFunction u = interpolate(
      grid, [](Point x) { return std::vector<Complex>{Complex(x.x * x.x, x.y)}; }, 1);
  const auto p2 = assemble_picard_operator(*grid, a, {2.0, 0.5}, u, zero_source(1));
  const auto nj = assemble_newton_jacobian(*grid, a, {2.0, 0.5}, u);
  CHECK((Eigen::MatrixXd(p2.A) - Eigen::MatrixXd(nj.A)).cwiseAbs().maxCoeff() <=
        1e-14);
}

TEST_CASE("newton jacobian at zero state with eps = 1 is the weighted stiffness") {
  auto grid = make_unit_grid(4, 3);
  const CoefficientField a = constant({1.0, 0.15});
  FEFunction u0(grid, 1);
  for (double p : {1.5, 3.0, 4.5}) {
    const auto nj = assemble_newton_jacobian(*grid, a, {p, 1.0}, u0);
    const auto pic = assemble_picard_operator(*grid, a, {p, 1.0}, u0, zero_source(1));
    CHECK((Eigen::MatrixXd(nj.A) - Eigen::MatrixXd(pic.A)).cwiseAbs().maxCoeff() <=
          1e-14);
  }
}

TEST_CASE("newton jacobian is refused for p < 2 with eps = 0") {
  auto grid = make_unit_grid(3, 3);
  FEFunction u(grid, 1);
  CHECK_THROWS_AS(
      assemble_newton_jacobian(*grid, constant({1.0, 0.0}), {1.5, 0.0}, u),
      std::domain_error);
  AssemblyOptions opts;
  opts.allow_singular_floor = true;
  const auto sys =
      assemble_newton_jacobian(*grid, constant({1.0, 0.0}), {1.5, 0.0}, u, opts);
  CHECK(sys.degenerate_cells.size() == static_cast<std::size_t>(grid->num_cells()));
}

TEST_CASE("newton jacobian matches central finite differences") {
  auto grid = make_unit_grid(10, 10);
  const int ncomp = 2;
  const CoefficientField a = constant({1.0, 0.2});
  const SourceField F = smooth_source(ncomp);
  FEFunction u = interpolate(
      grid,
      [ncomp](Point x) {
        std::vector<Complex> v(ncomp);
        for (int k = 0; k < ncomp; ++k)
          v[k] = Complex(std::sin(kPi * x.x) * x.y + 0.1 * k,
                         0.5 * std::cos(kPi * x.y) + 0.2 * x.x);
        return v;
      },
      ncomp);

  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double t = 1e-5;
  for (double p : {1.5, 2.0, 3.0}) {
    const FluxParams params{p, 0.5};
    const auto J = assemble_newton_jacobian(*grid, a, params, u);
    for (int dirs = 0; dirs < 20; ++dirs) {
      Eigen::VectorXd w(J.A.rows());
      for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = normal(rng);
      FEFunction up = u, um = u;
      set_interior(up, interior_vector(u) + t * w);
      set_interior(um, interior_vector(u) - t * w);
      const Eigen::VectorXd fd =
          (assemble_residual(*grid, a, params, F, up) -
           assemble_residual(*grid, a, params, F, um)) /
          (2 * t);
      const Eigen::VectorXd jw = J.A * w;
      CHECK((jw - fd).norm() <= 1e-5 * jw.norm());
    }
  }
}

TEST_CASE("norms of simple functions") {
  auto grid = make_unit_grid(8, 8);
  FEFunction zero(grid, 1);
  const auto nz = norms(zero, 3.0);
  CHECK(nz.w12 == 0.0);
  CHECK(nz.lp_grad == 0.0);
  CHECK(nz.sup_grad == 0.0);

  FEFunction fx = interpolate(
      grid, [](Point x) { return std::vector<Complex>{Complex(x.x, 0.0)}; }, 1);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto n = norms(fx, p);
    CHECK(n.lp_grad == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(n.sup_grad == doctest::Approx(1.0).epsilon(1e-13));
  }
  // ∫ x^2 = 1/3 and ∫ |grad|^2 = 1
  CHECK(norms(fx, 2.0).w12 == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-13));
}

TEST_CASE("norms are homogeneous under complex scaling") {
  auto grid = make_unit_grid(6, 6);
  FEFunction f = interpolate(
      grid,
      [](Point x) {
        return std::vector<Complex>{Complex(std::sin(kPi * x.x), x.y * x.x)};
      },
      1);
  const Complex lam(1.3, -0.8);
  FEFunction g = lam * f;
  const auto nf = norms(f, 3.0), ng = norms(g, 3.0);
  const double m = std::abs(lam);
  CHECK(ng.w12 == doctest::Approx(m * nf.w12).epsilon(1e-13));
  CHECK(ng.lp_grad == doctest::Approx(m * nf.lp_grad).epsilon(1e-13));
  CHECK(ng.sup_grad == doctest::Approx(m * nf.sup_grad).epsilon(1e-13));
}

TEST_CASE("dirichlet lifting") {
  auto grid = make_unit_grid(5, 5);
  const FEFunction z = lift_boundary(grid, zero_boundary(1), 1);
  for (const auto& v : z.values()) CHECK(v == Complex(0, 0));

  const FEFunction c = lift_boundary(
      grid, [](Point) { return std::vector<Complex>{Complex(2.0, -1.0)}; }, 1);
  for (int node = 0; node < grid->num_nodes(); ++node) {
    if (grid->is_boundary(node))
      CHECK(c.value(node, 0) == Complex(2.0, -1.0));
    else
      CHECK(c.value(node, 0) == Complex(0, 0));
  }

  const FEFunction g = lift_boundary(
      grid, [](Point x) { return std::vector<Complex>{Complex(x.x, x.y)}; }, 1);
  for (int node = 0; node < grid->num_nodes(); ++node)
    if (grid->is_boundary(node)) {
      const Point x = grid->node_coord(node);
      CHECK(g.value(node, 0) == Complex(x.x, x.y));
    }
}

TEST_CASE("interpolant refinement orders: h^2 values, h gradients") {
  auto exact = [](Point x) {
    return std::vector<Complex>{
        Complex(std::sin(kPi * x.x) * std::sin(kPi * x.y), 0.0)};
  };
  auto grad = [](Point x) {
    CMat g(1, 2);
    g.re(0, 0) = kPi * std::cos(kPi * x.x) * std::sin(kPi * x.y);
    g.re(0, 1) = kPi * std::sin(kPi * x.x) * std::cos(kPi * x.y);
    return g;
  };
  double prev_l2 = 0.0, prev_sup = 0.0;
  std::vector<double> l2s, sups;
  for (int m : {8, 16, 32}) {
    auto grid = make_unit_grid(m, m);
    FEFunction f = interpolate(grid, exact, 1);
    const QuadRule& rule = QuadRule::gauss2x2();
    double l2 = integrate(*grid, [&](int cell, int qp, Point x) {
      return std::norm(f.value_at(cell, rule.points[qp], 0) - exact(x)[0]);
    });
    double sup = 0.0;
    for (int cell = 0; cell < grid->num_cells(); ++cell)
      for (int q = 0; q < 4; ++q) {
        const Point x = grid->physical_point(cell, rule.points[q]);
        sup = std::max(sup, cnorm(gradient_at(f, cell, q) - grad(x)));
      }
    l2s.push_back(std::sqrt(l2));
    sups.push_back(sup);
    (void)prev_l2;
    (void)prev_sup;
  }
  const double order_l2 = std::log2(l2s[0] / l2s[1]);
  const double order_l2b = std::log2(l2s[1] / l2s[2]);
  const double order_sup = std::log2(sups[0] / sups[1]);
  CHECK(order_l2 == doctest::Approx(2.0).epsilon(0.1));
  CHECK(order_l2b == doctest::Approx(2.0).epsilon(0.05));
  CHECK(order_sup == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("solution dump round trip") {
  auto grid = make_unit_grid(4, 4);
  FEFunction f = interpolate(
      grid,
      [](Point x) {
        return std::vector<Complex>{Complex(x.x + 0.25, x.y - 0.5),
                                    Complex(-x.y, x.x * x.x)};
      },
      2);
  const std::string path = "/tmp/cplap_test_dump.csv";
  write_solution_csv(f, path);
  const FEFunction g = read_solution_csv(grid, 2, path);
  for (std::size_t i = 0; i < f.values().size(); ++i)
    CHECK(f.values()[i] == g.values()[i]);
}
