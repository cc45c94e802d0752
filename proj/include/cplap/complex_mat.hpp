#ifndef CPLAP_COMPLEX_MAT_HPP
#define CPLAP_COMPLEX_MAT_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "cplap/errors.hpp"

namespace cplap {

using Complex = std::complex<double>;

/// Value in C^{N x n} with split-real storage: the real and imaginary
/// planes live in separate contiguous arrays so the realified views and
/// the realified solver systems need no data movement.
class CMat {
 public:
  CMat() : rows_(0), cols_(0) {}

  CMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), re_(rows * cols, 0.0), im_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& re(std::size_t j, std::size_t d) { return re_[j * cols_ + d]; }
  double& im(std::size_t j, std::size_t d) { return im_[j * cols_ + d]; }
  double re(std::size_t j, std::size_t d) const { return re_[j * cols_ + d]; }
  double im(std::size_t j, std::size_t d) const { return im_[j * cols_ + d]; }

  Complex at(std::size_t j, std::size_t d) const {
    return {re(j, d), im(j, d)};
  }
  void set(std::size_t j, std::size_t d, Complex v) {
    re(j, d) = v.real();
    im(j, d) = v.imag();
  }

  const std::vector<double>& re_plane() const { return re_; }
  const std::vector<double>& im_plane() const { return im_; }

  bool same_shape(const CMat& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool is_finite() const {
    for (double v : re_)
      if (!std::isfinite(v)) return false;
    for (double v : im_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  /// Squared norm |F|^2 = |F^R|^2 + |F^I|^2.
  double norm2() const {
    double s = 0.0;
    for (double v : re_) s += v * v;
    for (double v : im_) s += v * v;
    return s;
  }

  CMat& operator+=(const CMat& o) {
    require_shape(o);
    for (std::size_t i = 0; i < re_.size(); ++i) {
      re_[i] += o.re_[i];
      im_[i] += o.im_[i];
    }
    return *this;
  }
  CMat& operator-=(const CMat& o) {
    require_shape(o);
    for (std::size_t i = 0; i < re_.size(); ++i) {
      re_[i] -= o.re_[i];
      im_[i] -= o.im_[i];
    }
    return *this;
  }
  /// Scale by a complex scalar.
  CMat& operator*=(Complex c) {
    for (std::size_t i = 0; i < re_.size(); ++i) {
      const double r = re_[i], m = im_[i];
      re_[i] = c.real() * r - c.imag() * m;
      im_[i] = c.real() * m + c.imag() * r;
    }
    return *this;
  }

  friend CMat operator+(CMat a, const CMat& b) { return a += b; }
  friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
  friend CMat operator*(Complex c, CMat a) { return a *= c; }
  friend CMat operator*(double c, CMat a) { return a *= Complex(c, 0.0); }

  void require_shape(const CMat& o) const {
    if (!same_shape(o))
      throw DimensionError("CMat shape mismatch: " + std::to_string(rows_) + "x" +
                           std::to_string(cols_) + " vs " + std::to_string(o.rows_) +
                           "x" + std::to_string(o.cols_));
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> re_, im_;
};

/// Realification of a CMat: a plain real 2N x n matrix.
struct RealMat2N {
  std::size_t rows = 0, cols = 0;
  std::vector<double> entries;  // row-major

  RealMat2N() = default;
  RealMat2N(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c, 0.0) {}

  double& at(std::size_t j, std::size_t d) { return entries[j * cols + d]; }
  double at(std::size_t j, std::size_t d) const { return entries[j * cols + d]; }

  double dot(const RealMat2N& o) const {
    if (rows != o.rows || cols != o.cols)
      throw DimensionError("RealMat2N shape mismatch in dot");
    double s = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) s += entries[i] * o.entries[i];
    return s;
  }

  double norm() const {
    double s = 0.0;
    for (double v : entries) s += v * v;
    return std::sqrt(s);
  }

  RealMat2N& operator-=(const RealMat2N& o) {
    if (rows != o.rows || cols != o.cols)
      throw DimensionError("RealMat2N shape mismatch in -=");
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i] -= o.entries[i];
    return *this;
  }
  friend RealMat2N operator-(RealMat2N a, const RealMat2N& b) { return a -= b; }
};

/// Complex inner product on C^{N x n}: sum over rows of F_j . conj(G_j),
/// linear in the first argument and conjugate-linear in the second.
inline Complex cinner(const CMat& F, const CMat& G) {
  F.require_shape(G);
  double re = 0.0, im = 0.0;
  const auto &fr = F.re_plane(), &fi = F.im_plane();
  const auto &gr = G.re_plane(), &gi = G.im_plane();
  for (std::size_t i = 0; i < fr.size(); ++i) {
    re += fr[i] * gr[i] + fi[i] * gi[i];
    im += -fr[i] * gi[i] + fi[i] * gr[i];
  }
  return {re, im};
}

/// Stacks the real rows over the imaginary rows: (F_1^R,...,F_N^R, F_1^I,...,F_N^I).
inline RealMat2N hat(const CMat& F) {
  RealMat2N out(2 * F.rows(), F.cols());
  for (std::size_t j = 0; j < F.rows(); ++j)
    for (std::size_t d = 0; d < F.cols(); ++d) {
      out.at(j, d) = F.re(j, d);
      out.at(F.rows() + j, d) = F.im(j, d);
    }
  return out;
}

/// The quarter-turn realification (-F_1^I,...,-F_N^I, F_1^R,...,F_N^R);
/// equals hat(i F).
inline RealMat2N check(const CMat& F) {
  RealMat2N out(2 * F.rows(), F.cols());
  for (std::size_t j = 0; j < F.rows(); ++j)
    for (std::size_t d = 0; d < F.cols(); ++d) {
      out.at(j, d) = -F.im(j, d);
      out.at(F.rows() + j, d) = F.re(j, d);
    }
  return out;
}

/// |F| = (|F^R|^2 + |F^I|^2)^{1/2}; coincides with |hat(F)| and |check(F)|.
inline double cnorm(const CMat& F) { return std::sqrt(F.norm2()); }

}  // namespace cplap

#endif
