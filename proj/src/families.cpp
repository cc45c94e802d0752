#include "cplap/families.hpp"

#include <cmath>
#include <set>

namespace cplap {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_keys(const Json& block, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (auto it = block.begin(); it != block.end(); ++it)
    if (allowed.find(it.key()) == allowed.end())
      throw ValidationError(where + ": unknown key '" + it.key() + "'");
}

double num_or(const Json& j, const std::string& key, double dflt) {
  return j.contains(key) ? j.at(key).get<double>() : dflt;
}

std::string name_of(const Json& params, const std::string& where) {
  if (!params.contains("name"))
    throw ValidationError(where + ": missing 'name'");
  return params.at("name").get<std::string>();
}

}  // namespace

CoefficientField make_coefficient(const Json& params, double nu, double L,
                                  double holder_exponent, double holder_bound) {
  const std::string name = name_of(params, "coefficient");
  CoefficientField f;
  f.nu = nu;
  f.L = L;
  f.holder_exponent = holder_exponent;
  f.holder_seminorm_bound = holder_bound;
  if (name == "const") {
    require_keys(params, {"name", "re", "im"}, "coefficient const");
    const Complex a(num_or(params, "re", 1.0), num_or(params, "im", 0.0));
    f.evaluator = [a](Point) { return a; };
  } else if (name == "affine") {
    require_keys(params, {"name", "c0_re", "c0_im", "gx_re", "gx_im", "gy_re", "gy_im"},
                 "coefficient affine");
    const Complex c0(num_or(params, "c0_re", 1.0), num_or(params, "c0_im", 0.0));
    const Complex gx(num_or(params, "gx_re", 0.0), num_or(params, "gx_im", 0.0));
    const Complex gy(num_or(params, "gy_re", 0.0), num_or(params, "gy_im", 0.0));
    f.evaluator = [c0, gx, gy](Point x) { return c0 + gx * x.x + gy * x.y; };
  } else if (name == "cos_imag") {
    require_keys(params, {"name", "re0", "amp", "freq"}, "coefficient cos_imag");
    const double re0 = num_or(params, "re0", 1.0);
    const double amp = num_or(params, "amp", 0.3);
    const double freq = num_or(params, "freq", 1.0);
    f.evaluator = [re0, amp, freq](Point x) {
      return Complex(re0, amp * std::cos(kPi * freq * x.x));
    };
  } else if (name == "xlinear") {
    require_keys(params, {"name"}, "coefficient xlinear");
    f.evaluator = [](Point x) { return Complex(x.x, 0.0); };
  } else {
    throw ValidationError("coefficient: unknown family '" + name + "'");
  }
  return f;
}

ParametricCoefficient make_parametric(const Json& params, double nu, double L,
                                      double holder_exponent, double holder_bound,
                                      Complex region_center, double region_radius) {
  const std::string name = name_of(params, "parametric coefficient");
  ParametricCoefficient pc;
  pc.nu = nu;
  pc.L = L;
  pc.holder_exponent = holder_exponent;
  pc.uniform_holder_bound = holder_bound;
  pc.region_center = region_center;
  pc.region_radius = region_radius;
  if (name == "const_z") {
    require_keys(params, {"name", "a0_re", "a0_im"}, "parametric const_z");
    const Complex a0(num_or(params, "a0_re", 1.0), num_or(params, "a0_im", 0.0));
    pc.evaluator = [a0](Complex, Point) { return a0; };
    pc.derivative_evaluator = [](Complex, Point) { return Complex(0, 0); };
  } else if (name == "affine_z") {
    require_keys(params,
                 {"name", "a0_re", "a0_im", "a1_re", "a1_im", "a1_profile"},
                 "parametric affine_z");
    const Complex a0(num_or(params, "a0_re", 1.0), num_or(params, "a0_im", 0.0));
    const Complex a1(num_or(params, "a1_re", 0.1), num_or(params, "a1_im", 0.05));
    const std::string profile =
        params.contains("a1_profile") ? params.at("a1_profile").get<std::string>()
                                      : "const";
    std::function<double(Point)> g;
    if (profile == "const")
      g = [](Point) { return 1.0; };
    else if (profile == "cosx")
      g = [](Point x) { return std::cos(kPi * x.x); };
    else
      throw ValidationError("parametric affine_z: unknown a1_profile '" + profile + "'");
    pc.evaluator = [a0, a1, g](Complex z, Point x) { return a0 + z * a1 * g(x); };
    pc.derivative_evaluator = [a1, g](Complex, Point x) { return a1 * g(x); };
  } else if (name == "exp_z") {
    require_keys(params, {"name", "g_re", "g_im"}, "parametric exp_z");
    const Complex g(num_or(params, "g_re", 1.0), num_or(params, "g_im", 0.0));
    pc.evaluator = [g](Complex z, Point) { return std::exp(z) * g; };
    pc.derivative_evaluator = [g](Complex z, Point) { return std::exp(z) * g; };
  } else {
    throw ValidationError("parametric coefficient: unknown family '" + name + "'");
  }
  return pc;
}

ManufacturedSolution make_manufactured(const Json& params, int ncomp) {
  const std::string name = name_of(params, "manufactured solution");
  if (name != "sinsin")
    throw ValidationError("manufactured solution: unknown family '" + name + "'");
  require_keys(params, {"name", "amp"}, "manufactured sinsin");
  const double amp = num_or(params, "amp", 1.0);
  const Complex phase(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  ManufacturedSolution mf;
  mf.ncomp = ncomp;
  mf.value = [amp, phase, ncomp](Point x) {
    std::vector<Complex> v(ncomp);
    const double s = std::sin(kPi * x.x) * std::sin(kPi * x.y);
    for (int k = 0; k < ncomp; ++k) v[k] = (amp / (k + 1.0)) * s * phase;
    return v;
  };
  mf.gradient = [amp, phase, ncomp](Point x) {
    CMat g(ncomp, 2);
    const double gx = kPi * std::cos(kPi * x.x) * std::sin(kPi * x.y);
    const double gy = kPi * std::sin(kPi * x.x) * std::cos(kPi * x.y);
    for (int k = 0; k < ncomp; ++k) {
      const Complex c = (amp / (k + 1.0)) * phase;
      g.set(k, 0, c * gx);
      g.set(k, 1, c * gy);
    }
    return g;
  };
  return mf;
}

SourceField manufactured_source(const ManufacturedSolution& mf,
                                const CoefficientField& a,
                                const FluxParams& params) {
  SourceField F;
  F.ncomp = mf.ncomp;
  F.holder_exponent = 1.0 - 1e-12;  // analytic data; metadata only
  auto aeval = a.evaluator;
  auto grad = mf.gradient;
  FluxParams fp = params;
  F.evaluator = [aeval, grad, fp](Point x) {
    CMat g = grad(x);
    CMat fl = flux(fp, g);
    fl *= aeval(x);
    return fl;
  };
  return F;
}

SourceField make_source(const Json& params, int ncomp, const CoefficientField& a,
                        const FluxParams& flux_params, double holder_exponent,
                        double holder_bound) {
  const std::string name = name_of(params, "source");
  SourceField F;
  F.ncomp = ncomp;
  F.holder_exponent = holder_exponent;
  F.holder_seminorm_bound = holder_bound;
  if (name == "zero") {
    require_keys(params, {"name"}, "source zero");
    F.evaluator = [ncomp](Point) { return CMat(ncomp, 2); };
  } else if (name == "smooth") {
    require_keys(params, {"name", "amp"}, "source smooth");
    const double amp = num_or(params, "amp", 1.0);
    F.evaluator = [ncomp, amp](Point x) {
      CMat f(ncomp, 2);
      for (int k = 0; k < ncomp; ++k) {
        const double sc = amp / (k + 1.0);
        f.set(k, 0, sc * Complex(std::sin(kPi * x.x) * std::cos(kPi * x.y),
                                 0.4 * std::cos(kPi * x.x)));
        f.set(k, 1, sc * Complex(std::cos(kPi * x.x) * std::sin(kPi * x.y),
                                 -0.2 * std::sin(kPi * x.y)));
      }
      return f;
    };
  } else if (name == "manufactured") {
    require_keys(params, {"name", "solution"}, "source manufactured");
    const Json sol = params.contains("solution")
                         ? params.at("solution")
                         : Json{{"name", "sinsin"}};
    return manufactured_source(make_manufactured(sol, ncomp), a, flux_params);
  } else {
    throw ValidationError("source: unknown family '" + name + "'");
  }
  return F;
}

BoundaryData make_boundary(const Json& params, int ncomp) {
  const std::string name = name_of(params, "boundary");
  if (name == "zero") {
    require_keys(params, {"name"}, "boundary zero");
    return zero_boundary(ncomp);
  }
  if (name == "const") {
    require_keys(params, {"name", "re", "im"}, "boundary const");
    const Complex c(num_or(params, "re", 0.0), num_or(params, "im", 0.0));
    return [c, ncomp](Point) { return std::vector<Complex>(ncomp, c); };
  }
  if (name == "affine_xy") {
    require_keys(params, {"name"}, "boundary affine_xy");
    return [ncomp](Point x) {
      return std::vector<Complex>(ncomp, Complex(x.x, x.y));
    };
  }
  if (name == "trace") {
    require_keys(params, {"name", "solution"}, "boundary trace");
    const Json sol = params.contains("solution") ? params.at("solution")
                                                 : Json{{"name", "sinsin"}};
    ManufacturedSolution mf = make_manufactured(sol, ncomp);
    return [mf](Point x) { return mf.value(x); };
  }
  throw ValidationError("boundary: unknown family '" + name + "'");
}

}  // namespace cplap
