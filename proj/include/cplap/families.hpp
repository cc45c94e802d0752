#ifndef CPLAP_FAMILIES_HPP
#define CPLAP_FAMILIES_HPP

#include "cplap/coefficients.hpp"
#include "cplap/fe_function.hpp"
#include "cplap/structure.hpp"

// vendored single-header nlohmann/json
#include "json.hpp"

namespace cplap {

using Json = nlohmann::json;

/// Analytic reference solution with its exact gradient.
struct ManufacturedSolution {
  int ncomp = 1;
  std::function<std::vector<Complex>(Point)> value;
  std::function<CMat(Point)> gradient;
};

/// Named coefficient families:
///   const    {re, im}
///   affine   {c0_re, c0_im, gx_re, gx_im, gy_re, gy_im}
///   cos_imag {re0, amp, freq}   -> re0 + i amp cos(pi freq x)
///   xlinear  {}                 -> x (real; fails the ellipticity box, used
///                                  by the Hoelder estimators)
CoefficientField make_coefficient(const Json& params, double nu, double L,
                                  double holder_exponent, double holder_bound);

/// Named parametric families:
///   const_z  {a0_re, a0_im}                  a(z) = a0,            a' = 0
///   affine_z {a0_re, a0_im, a1_re, a1_im,    a(z) = a0 + z a1 g(x), a' = a1 g(x)
///             a1_profile: "const"|"cosx"}
///   exp_z    {g_re, g_im}                    a(z) = e^z g,          a' = e^z g
ParametricCoefficient make_parametric(const Json& params, double nu, double L,
                                      double holder_exponent, double holder_bound,
                                      Complex region_center, double region_radius);

/// Named sources:
///   zero   {}
///   smooth {amp}
///   manufactured {solution block...} (uses coefficient + flux params)
SourceField make_source(const Json& params, int ncomp,
                        const CoefficientField& a, const FluxParams& flux_params,
                        double holder_exponent, double holder_bound);

/// Named manufactured solutions:
///   sinsin {amp}  u*_k = amp/(k+1) sin(pi x) sin(pi y) (1+i)/sqrt(2)
ManufacturedSolution make_manufactured(const Json& params, int ncomp);

/// Named boundary data:
///   zero {} | const {re, im} | affine_xy {} (x + i y) | trace {solution...}
BoundaryData make_boundary(const Json& params, int ncomp);

/// F = a (eps^2 + |grad u*|^2)^{(p-2)/2} grad u*, making u* the exact
/// continuum solution of the Dirichlet problem with its own trace.
SourceField manufactured_source(const ManufacturedSolution& mf,
                                const CoefficientField& a,
                                const FluxParams& params);

}  // namespace cplap

#endif
