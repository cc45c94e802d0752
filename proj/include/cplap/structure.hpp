#ifndef CPLAP_STRUCTURE_HPP
#define CPLAP_STRUCTURE_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>

#include "cplap/complex_mat.hpp"

namespace cplap {

/// Exponent p and regularization eps of the degenerate flux
/// xi -> (eps^2 + |xi|^2)^{(p-2)/2} xi.
struct FluxParams {
  double p = 2.0;
  double eps = 0.0;

  void validate() const {
    if (!(p > 1.0)) throw ValidationError("FluxParams: p must be > 1");
    if (!(eps >= 0.0 && eps <= 1.0))
      throw ValidationError("FluxParams: eps must lie in [0,1]");
  }
};

/// Coercivity (c1), Lipschitz (c2) and the empirical two-sided constant
/// of the V-map comparison (c3).
struct StructureConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
};

/// Result of the empirical c3 search; exportable as a JSON fixture.
struct C3SearchReport {
  double p = 2.0;
  double eps = 0.0;
  long samples = 0;
  double ratio_min = 1.0;
  double ratio_max = 1.0;
  double c3 = 2.0;  // band constant: all sampled ratios lie in [1/c3, c3]
};

/// (eps^2 + s2)^{q} computed as exp(q log(.)), with the continuous
/// extension 0 at s2 = eps = 0. q is the exponent, s2 = |xi|^2.
double degenerate_weight(double eps, double s2, double q);

/// The p-Laplace flux A(xi) = (eps^2+|xi|^2)^{(p-2)/2} xi.
CMat flux(const FluxParams& params, const CMat& xi);

/// <A(F)-A(G), F-G> in the complex pairing. Real part equals the
/// realified monotonicity form, imaginary part the hat-against-check form.
Complex monotonicity_pair(const FluxParams& params, const CMat& F, const CMat& G);

/// c1 (eps^2+|F|^2+|G|^2)^{(p-2)/2} |F-G|^2, the coercivity lower bound.
double lower_gap(const FluxParams& params, const CMat& F, const CMat& G);

/// c2 (eps^2+|F|^2+|G|^2)^{(p-2)/2} |F-G|, the Lipschitz upper bound for
/// |A(F)-A(G)|.
double lipschitz_gap(const FluxParams& params, const CMat& F, const CMat& G);

/// V(xi) = (eps^2+|xi|^2)^{(p-4)/4 + 1/2} xi, i.e. exponent (p-2)/4.
CMat v_map(const FluxParams& params, const CMat& xi);

/// Coercivity constant: (1/3)(1/(3 sqrt 2))^{p-2} for p > 2, p-1 for
/// p < 2, exactly 1 at p = 2 (the sharp value there).
double c1_of(double p);

/// Lipschitz constant: p-1 for p > 2, 8 for p < 2, exactly 1 at p = 2.
double c2_of(double p);

/// Empirical search for the two-sided V-map constant: max/min of
///   |V(F)-V(G)|^2 / [(eps^2+|F|^2+|G|^2)^{(p-2)/2} |F-G|^2]
/// over seeded random and adversarial (near-parallel, near-zero,
/// tiny-difference) pairs. The reported c3 is twice the max ratio.
C3SearchReport c3_search(const FluxParams& params, long samples,
                         std::uint64_t seed = 20240901ULL, std::size_t N = 2,
                         std::size_t n = 2);

/// Deterministic sample stream mixing plain random pairs with the
/// adversarial configurations (relative separations 1e-8/1e-4/1/1e4,
/// near-parallel, near-zero). Index k selects the configuration.
std::pair<CMat, CMat> sample_structure_pair(std::mt19937_64& rng, std::size_t N,
                                            std::size_t n, long k);

StructureConstants structure_constants(double p, const C3SearchReport& c3);

}  // namespace cplap

#endif
