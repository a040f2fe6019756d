#pragma once

// Dense linear algebra for the small systems that show up in this project:
// 2x2 next-generation matrices, 3x3 and 5x5 Jacobians.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace exclab {

/// Row-major dense real matrix of dimension n <= kMaxDim.
class SmallMatrix {
 public:
  static constexpr std::size_t kMaxDim = 8;

  SmallMatrix() = default;
  explicit SmallMatrix(std::size_t n);
  SmallMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SmallMatrix identity(std::size_t n);

  std::size_t dim() const noexcept { return n_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * kMaxDim + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * kMaxDim + j]; }

  /// Maximum absolute row sum.
  double norm_inf() const noexcept;
  bool all_finite() const noexcept;

  SmallMatrix transpose() const;
  std::vector<double> apply(std::span<const double> x) const;

  friend SmallMatrix operator*(const SmallMatrix& lhs, const SmallMatrix& rhs);
  friend SmallMatrix operator*(double c, const SmallMatrix& m);
  friend SmallMatrix operator-(const SmallMatrix& lhs, const SmallMatrix& rhs);

 private:
  std::size_t n_ = 0;
  std::array<double, kMaxDim * kMaxDim> a_{};
};

/// Eigenvalues sorted by descending real part, ties by descending imaginary part.
struct EigenSet {
  std::vector<std::complex<double>> values;

  std::size_t size() const noexcept { return values.size(); }
  const std::complex<double>& operator[](std::size_t i) const { return values[i]; }
  double max_real_part() const;
  double max_modulus() const;
};

/// Gaussian elimination with partial pivoting. Throws SingularMatrixError
/// when a pivot falls below 1e-13 * ||A||_inf.
std::vector<double> solve_linear(const SmallMatrix& a, std::span<const double> b);

/// Computes F * V^{-1} without forming the inverse.
SmallMatrix right_divide(const SmallMatrix& f, const SmallMatrix& v);

/// Balancing, Hessenberg reduction, then Francis double-shift QR. n = 2 uses
/// the closed-form quadratic. Throws NoConvergenceError after 200*n sweeps.
EigenSet eigenvalues(const SmallMatrix& a);

double spectral_radius(const SmallMatrix& a);

}  // namespace exclab
