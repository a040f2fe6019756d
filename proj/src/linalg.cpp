#include "exclusion_lab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "exclusion_lab/errors.hpp"

namespace exclab {

SmallMatrix::SmallMatrix(std::size_t n) : n_(n) {
  if (n == 0 || n > kMaxDim) {
    throw std::invalid_argument("SmallMatrix dimension must be in [1, 8], got " +
                                std::to_string(n));
  }
}

SmallMatrix::SmallMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SmallMatrix(rows.size()) {
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != n_) {
      throw std::invalid_argument("SmallMatrix rows must all have length n");
    }
    std::size_t j = 0;
    for (double v : row) (*this)(i, j++) = v;
    ++i;
  }
}

SmallMatrix SmallMatrix::identity(std::size_t n) {
  SmallMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double SmallMatrix::norm_inf() const noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n_; ++j) row += std::abs((*this)(i, j));
    best = std::max(best, row);
  }
  return best;
}

bool SmallMatrix::all_finite() const noexcept {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (!std::isfinite((*this)(i, j))) return false;
  return true;
}

SmallMatrix SmallMatrix::transpose() const {
  SmallMatrix t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

std::vector<double> SmallMatrix::apply(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("SmallMatrix::apply: length mismatch");
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
  return y;
}

SmallMatrix operator*(const SmallMatrix& lhs, const SmallMatrix& rhs) {
  if (lhs.dim() != rhs.dim()) throw std::invalid_argument("SmallMatrix product: dim mismatch");
  SmallMatrix out(lhs.dim());
  for (std::size_t i = 0; i < lhs.dim(); ++i)
    for (std::size_t k = 0; k < lhs.dim(); ++k)
      for (std::size_t j = 0; j < lhs.dim(); ++j) out(i, j) += lhs(i, k) * rhs(k, j);
  return out;
}

SmallMatrix operator*(double c, const SmallMatrix& m) {
  SmallMatrix out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = c * m(i, j);
  return out;
}

SmallMatrix operator-(const SmallMatrix& lhs, const SmallMatrix& rhs) {
  if (lhs.dim() != rhs.dim()) throw std::invalid_argument("SmallMatrix difference: dim mismatch");
  SmallMatrix out(lhs.dim());
  for (std::size_t i = 0; i < lhs.dim(); ++i)
    for (std::size_t j = 0; j < lhs.dim(); ++j) out(i, j) = lhs(i, j) - rhs(i, j);
  return out;
}

double EigenSet::max_real_part() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : values) best = std::max(best, v.real());
  return best;
}

double EigenSet::max_modulus() const {
  double best = 0.0;
  for (const auto& v : values) best = std::max(best, std::abs(v));
  return best;
}

std::vector<double> solve_linear(const SmallMatrix& a, std::span<const double> b) {
  const std::size_t n = a.dim();
  if (b.size() != n) throw std::invalid_argument("solve_linear: rhs length mismatch");

  const double threshold = 1e-13 * a.norm_inf();
  SmallMatrix lu = a;
  std::vector<double> x(b.begin(), b.end());

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (!(std::abs(lu(piv, k)) > threshold)) {
      throw SingularMatrixError("solve_linear: pivot " + std::to_string(lu(piv, k)) +
                                " below singularity threshold at column " + std::to_string(k));
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      std::swap(x[k], x[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = lu(i, k) / lu(k, k);
      if (m == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= m * lu(k, j);
      x[i] -= m * x[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = x[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= lu(k, j) * x[j];
    x[k] = s / lu(k, k);
  }
  return x;
}

SmallMatrix right_divide(const SmallMatrix& f, const SmallMatrix& v) {
  // N V = F  <=>  V^T n_i = f_i for every row i.
  const std::size_t n = f.dim();
  if (v.dim() != n) throw std::invalid_argument("right_divide: dim mismatch");
  const SmallMatrix vt = v.transpose();
  SmallMatrix out(n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = f(i, j);
    const auto sol = solve_linear(vt, row);
    for (std::size_t j = 0; j < n; ++j) out(i, j) = sol[j];
  }
  return out;
}

namespace {

using cplx = std::complex<double>;

void sort_eigenvalues(std::vector<cplx>& v) {
  std::sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

std::vector<cplx> quadratic_eigenvalues(const SmallMatrix& a) {
  const double half_trace = 0.5 * (a(0, 0) + a(1, 1));
  const double half_diff = 0.5 * (a(0, 0) - a(1, 1));
  const double disc = half_diff * half_diff + a(0, 1) * a(1, 0);
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    // Larger-magnitude root first, the other from the determinant to avoid
    // cancellation.
    const double big = half_trace >= 0.0 ? half_trace + root : half_trace - root;
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double small = big != 0.0 ? det / big : 0.0;
    return {cplx(big, 0.0), cplx(small, 0.0)};
  }
  const double im = std::sqrt(-disc);
  return {cplx(half_trace, im), cplx(half_trace, -im)};
}

void balance(SmallMatrix& a) {
  const std::size_t n = a.dim();
  constexpr double radix = std::numeric_limits<double>::radix;
  constexpr double sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transformations.
void to_hessenberg(SmallMatrix& a) {
  const std::size_t n = a.dim();
  for (std::size_t m = 1; m + 1 < n; ++m) {
    double x = 0.0;
    std::size_t i = m;
    for (std::size_t j = m; j < n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        i = j;
      }
    }
    if (i != m) {
      for (std::size_t j = m - 1; j < n; ++j) std::swap(a(i, j), a(m, j));
      for (std::size_t j = 0; j < n; ++j) std::swap(a(j, i), a(j, m));
    }
    if (x == 0.0) continue;
    for (i = m + 1; i < n; ++i) {
      double y = a(i, m - 1);
      if (y == 0.0) continue;
      y /= x;
      a(i, m - 1) = y;
      for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
      for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
    }
  }
  for (std::size_t r = 2; r < n; ++r)
    for (std::size_t c = 0; c + 1 < r; ++c) a(r, c) = 0.0;
}

double sign_of(double magnitude, double sign) { return sign >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude); }

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
std::vector<cplx> hessenberg_qr(SmallMatrix& a) {
  const int n = static_cast<int>(a.dim());
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const int sweep_cap = 200 * n;
  std::vector<cplx> w(static_cast<std::size_t>(n));

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  int nn = n - 1;
  int total_sweeps = 0;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        w[nn--] = cplx(x + t, 0.0);
      } else {
        double y = a(nn - 1, nn - 1);
        double wv = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + wv;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            w[nn - 1] = w[nn] = cplx(x + z, 0.0);
            if (z != 0.0) w[nn] = cplx(x - wv / z, 0.0);
          } else {
            w[nn] = cplx(x + p, -z);
            w[nn - 1] = cplx(x + p, z);
          }
          nn -= 2;
        } else {
          if (total_sweeps >= sweep_cap) {
            throw NoConvergenceError("eigenvalues: QR iteration exceeded " +
                                     std::to_string(sweep_cap) + " sweeps");
          }
          if (its > 0 && its % 10 == 0) {
            // Exceptional shift.
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            wv = -0.4375 * s * s;
          }
          ++its;
          ++total_sweeps;
          int m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - wv) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                            std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k + 1 != nn) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k + 1 != nn) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (nn >= 0 && l < nn - 1);
  }
  return w;
}

}  // namespace

EigenSet eigenvalues(const SmallMatrix& a) {
  if (!a.all_finite()) throw std::invalid_argument("eigenvalues: matrix has non-finite entries");
  EigenSet out;
  switch (a.dim()) {
    case 1:
      out.values = {cplx(a(0, 0), 0.0)};
      break;
    case 2:
      out.values = quadratic_eigenvalues(a);
      break;
    default: {
      SmallMatrix h = a;
      balance(h);
      to_hessenberg(h);
      out.values = hessenberg_qr(h);
      break;
    }
  }
  sort_eigenvalues(out.values);
  return out;
}

double spectral_radius(const SmallMatrix& a) { return eigenvalues(a).max_modulus(); }

}  // namespace exclab
