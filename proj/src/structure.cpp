#include "cplap/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cplap {

double degenerate_weight(double eps, double s2, double q) {
  const double s = eps * eps + s2;
  if (s == 0.0) return 0.0;  // continuous extension; callers guard q < 0 use
  if (q == 0.0) return 1.0;
  return std::exp(q * std::log(s));
}

CMat flux(const FluxParams& params, const CMat& xi) {
  const double s2 = xi.norm2();
  if (params.eps == 0.0 && s2 == 0.0) return CMat(xi.rows(), xi.cols());
  const double w = degenerate_weight(params.eps, s2, 0.5 * (params.p - 2.0));
  return w * xi;
}

Complex monotonicity_pair(const FluxParams& params, const CMat& F, const CMat& G) {
  F.require_shape(G);
  return cinner(flux(params, F) - flux(params, G), F - G);
}

static double pair_weight(const FluxParams& params, const CMat& F, const CMat& G,
                          double q) {
  return degenerate_weight(params.eps, F.norm2() + G.norm2(), q);
}

double lower_gap(const FluxParams& params, const CMat& F, const CMat& G) {
  const CMat d = F - G;
  return c1_of(params.p) * pair_weight(params, F, G, 0.5 * (params.p - 2.0)) *
         d.norm2();
}

double lipschitz_gap(const FluxParams& params, const CMat& F, const CMat& G) {
  const CMat d = F - G;
  return c2_of(params.p) * pair_weight(params, F, G, 0.5 * (params.p - 2.0)) *
         cnorm(d);
}

CMat v_map(const FluxParams& params, const CMat& xi) {
  const double s2 = xi.norm2();
  if (params.eps == 0.0 && s2 == 0.0) return CMat(xi.rows(), xi.cols());
  const double w = degenerate_weight(params.eps, s2, 0.25 * (params.p - 2.0));
  return w * xi;
}

double c1_of(double p) {
  if (!(p > 1.0)) throw ValidationError("c1_of: p must be > 1");
  if (p == 2.0) return 1.0;  // sharp at p = 2, overriding the p >= 2 formula
  if (p > 2.0) return (1.0 / 3.0) * std::pow(1.0 / (3.0 * std::sqrt(2.0)), p - 2.0);
  return p - 1.0;
}

double c2_of(double p) {
  if (!(p > 1.0)) throw ValidationError("c2_of: p must be > 1");
  if (p == 2.0) return 1.0;
  return p > 2.0 ? p - 1.0 : 8.0;
}

namespace {

CMat random_cmat(std::mt19937_64& rng, std::size_t N, std::size_t n, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMat F(N, n);
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t d = 0; d < n; ++d)
      F.set(j, d, scale * Complex(normal(rng), normal(rng)));
  return F;
}

}  // namespace

std::pair<CMat, CMat> sample_structure_pair(std::mt19937_64& rng, std::size_t N,
                                            std::size_t n, long k) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Relative separations stressing the degenerate/singular regimes.
  static constexpr double separations[] = {1e-8, 1e-4, 1.0, 1e4};

  const double scale = std::pow(10.0, 4.0 * uni(rng) - 2.0);
  CMat F = random_cmat(rng, N, n, scale);
  CMat G(N, n);
  switch (k % 4) {
    case 0:
      G = random_cmat(rng, N, n, scale);
      break;
    case 1: {  // controlled relative separation
      const double sep = separations[(k / 4) % 4];
      G = F + (sep * scale) * random_cmat(rng, N, n, 1.0);
      break;
    }
    case 2: {  // near-parallel
      const Complex lam(normal(rng), normal(rng));
      G = lam * F + (1e-7 * scale) * random_cmat(rng, N, n, 1.0);
      break;
    }
    default:  // near-zero partner
      G = random_cmat(rng, N, n, 1e-8 * scale);
      break;
  }
  return {std::move(F), std::move(G)};
}

C3SearchReport c3_search(const FluxParams& params, long samples, std::uint64_t seed,
                         std::size_t N, std::size_t n) {
  params.validate();
  if (samples < 1000) throw ValidationError("c3_search: need at least 10^3 samples");

  std::mt19937_64 rng(seed);

  C3SearchReport rep;
  rep.p = params.p;
  rep.eps = params.eps;
  rep.samples = samples;
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0.0;

  for (long k = 0; k < samples; ++k) {
    auto [F, G] = sample_structure_pair(rng, N, n, k);
    const CMat d = F - G;
    const double nd2 = d.norm2();
    if (nd2 == 0.0) continue;
    const double denom = pair_weight(params, F, G, 0.5 * (params.p - 2.0)) * nd2;
    if (denom == 0.0) continue;
    const CMat dv = v_map(params, F) - v_map(params, G);
    const double ratio = dv.norm2() / denom;
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
  }

  rep.ratio_min = rmin;
  rep.ratio_max = rmax;
  rep.c3 = 2.0 * rmax;
  return rep;
}

StructureConstants structure_constants(double p, const C3SearchReport& c3) {
  return {c1_of(p), c2_of(p), c3.c3};
}

}  // namespace cplap
