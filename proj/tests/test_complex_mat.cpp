#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "cplap/complex_mat.hpp"
#include "doctest.h"

using namespace cplap;

namespace {

CMat random_cmat(std::mt19937_64& rng, std::size_t N, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMat F(N, n);
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t d = 0; d < n; ++d)
      F.set(j, d, Complex(normal(rng), normal(rng)));
  return F;
}

CMat unit_entry(std::size_t N, std::size_t n, Complex v) {
  CMat F(N, n);
  F.set(0, 0, v);
  return F;
}

}  // namespace

TEST_CASE("cinner on unit entries") {
  const CMat e = unit_entry(1, 2, Complex(1, 0));
  const CMat ie = unit_entry(1, 2, Complex(0, 1));
  CHECK(cinner(e, e) == Complex(1, 0));
  CHECK(cinner(ie, e) == Complex(0, 1));
  CHECK(cinner(e, ie) == Complex(0, -1));  // conjugate-linear second slot
}

TEST_CASE("cinner conjugate symmetry and norm compatibility") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 200; ++it) {
    const CMat F = random_cmat(rng, 2, 3), G = random_cmat(rng, 2, 3);
    const Complex fg = cinner(F, G), gf = cinner(G, F);
    CHECK(fg.real() == doctest::Approx(gf.real()).epsilon(1e-14));
    CHECK(fg.imag() == doctest::Approx(-gf.imag()).epsilon(1e-14));
    const Complex ff = cinner(F, F);
    CHECK(std::abs(ff.imag()) <= 1e-14 * std::abs(ff.real()));
    const double n2 = cnorm(F) * cnorm(F);
    CHECK(ff.real() == doctest::Approx(n2).epsilon(1e-14));
  }
}

TEST_CASE("cinner shape mismatch") {
  CHECK_THROWS_AS(cinner(CMat(1, 2), CMat(2, 2)), DimensionError);
}

TEST_CASE("hat and check on unit entries") {
  const CMat e = unit_entry(1, 2, Complex(1, 0));
  const RealMat2N he = hat(e);
  CHECK(he.at(0, 0) == 1.0);
  CHECK(he.at(0, 1) == 0.0);
  CHECK(he.at(1, 0) == 0.0);
  CHECK(he.at(1, 1) == 0.0);

  const CMat ie = unit_entry(1, 2, Complex(0, 1));
  const RealMat2N hie = hat(ie);
  CHECK(hie.at(0, 0) == 0.0);
  CHECK(hie.at(1, 0) == 1.0);

  const RealMat2N ce = check(e);
  CHECK(ce.at(0, 0) == 0.0);
  CHECK(ce.at(1, 0) == 1.0);
  const RealMat2N cie = check(ie);
  CHECK(cie.at(0, 0) == -1.0);
  CHECK(cie.at(1, 0) == 0.0);
}

TEST_CASE("check equals hat of i F") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 100; ++it) {
    const CMat F = random_cmat(rng, 3, 2);
    const RealMat2N lhs = check(F);
    const RealMat2N rhs = hat(Complex(0, 1) * F);
    REQUIRE(lhs.rows == rhs.rows);
    for (std::size_t j = 0; j < lhs.rows; ++j)
      for (std::size_t d = 0; d < lhs.cols; ++d)
        CHECK(lhs.at(j, d) == rhs.at(j, d));
  }
}

TEST_CASE("norm equivalence of the realifications") {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 100; ++it) {
    const CMat F = random_cmat(rng, 2, 3);
    const double n = cnorm(F);
    CHECK(hat(F).norm() == doctest::Approx(n).epsilon(1e-15));
    CHECK(check(F).norm() == doctest::Approx(n).epsilon(1e-15));
  }
}

TEST_CASE("realification identity for the inner product") {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 300; ++it) {
    const CMat F = random_cmat(rng, 2, 3), G = random_cmat(rng, 2, 3);
    const Complex ip = cinner(F, G);
    const double re = hat(F).dot(hat(G));
    const double im = hat(F).dot(check(G));
    const double scale = cnorm(F) * cnorm(G) + 1e-300;
    CHECK(std::abs(ip.real() - re) <= 1e-14 * scale);
    CHECK(std::abs(ip.imag() - im) <= 1e-14 * scale);
  }
}

TEST_CASE("sesquilinearity") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    const CMat F = random_cmat(rng, 2, 2), G = random_cmat(rng, 2, 2),
               H = random_cmat(rng, 2, 2);
    const Complex alpha(normal(rng), normal(rng));
    const Complex lhs1 = cinner(alpha * F + G, H);
    const Complex rhs1 = alpha * cinner(F, H) + cinner(G, H);
    CHECK(std::abs(lhs1 - rhs1) <= 1e-13 * (std::abs(lhs1) + std::abs(rhs1) + 1.0));
    const Complex lhs2 = cinner(F, alpha * G);
    const Complex rhs2 = std::conj(alpha) * cinner(F, G);
    CHECK(std::abs(lhs2 - rhs2) <= 1e-13 * (std::abs(lhs2) + std::abs(rhs2) + 1.0));
  }
}

TEST_CASE("pythagorean norm") {
  CMat F(1, 1);
  F.re(0, 0) = 3.0;
  F.im(0, 0) = 4.0;
  CHECK(cnorm(F) == doctest::Approx(5.0));
  CHECK(cnorm(CMat(2, 2)) == 0.0);
}

TEST_CASE("finiteness detection") {
  CMat F(1, 2);
  CHECK(F.is_finite());
  F.re(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_FALSE(F.is_finite());
}
