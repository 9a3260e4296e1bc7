#pragma once

// Small dense symmetric and 2x2 matrix utilities for the certificate and
// decay computations. Sizes are compile-time (n <= 3 in practice).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

namespace hybdiff {

template <std::size_t N>
using Mat = std::array<std::array<double, N>, N>;

using Mat2 = Mat<2>;
using Mat3 = Mat<3>;

class AsymmetricInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <std::size_t N>
double max_abs(const Mat<N>& m) {
  double s = 0.0;
  for (const auto& row : m)
    for (double v : row) s = std::max(s, std::abs(v));
  return s;
}

template <std::size_t N>
bool is_symmetric(const Mat<N>& m, double tol = 1e-12) {
  const double scale = std::max(1.0, max_abs(m));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j)
      if (std::abs(m[i][j] - m[j][i]) > tol * scale) return false;
  return true;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
template <std::size_t N>
std::array<double, N> jacobi_eigenvalues(Mat<N> a) {
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::array<double, N> ev;
  for (std::size_t i = 0; i < N; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

namespace detail {

inline std::array<double, 1> closed_form_eigenvalues(const Mat<1>& m) { return {m[0][0]}; }

inline std::array<double, 2> closed_form_eigenvalues(const Mat2& m) {
  const double mean = 0.5 * (m[0][0] + m[1][1]);
  const double half = 0.5 * (m[0][0] - m[1][1]);
  const double disc = half * half + m[0][1] * m[1][0];
  const double scale = std::max(1.0, max_abs(m));
  if (disc < 1e-14 * scale * scale) return jacobi_eigenvalues(m);
  const double r = std::sqrt(disc);
  return {mean - r, mean + r};
}

// Trigonometric solution of the characteristic cubic.
inline std::array<double, 3> closed_form_eigenvalues(const Mat3& m) {
  const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  if (p1 == 0.0) {
    std::array<double, 3> d{m[0][0], m[1][1], m[2][2]};
    std::sort(d.begin(), d.end());
    return d;
  }
  const double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
  const double d0 = m[0][0] - q, d1 = m[1][1] - q, d2 = m[2][2] - q;
  const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const double b00 = d0 / p, b11 = d1 / p, b22 = d2 / p;
  const double b01 = m[0][1] / p, b02 = m[0][2] / p, b12 = m[1][2] / p;
  const double det = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
                     b02 * (b01 * b12 - b11 * b02);
  const double r = 0.5 * det;
  // Near-coincident roots make acos ill-conditioned.
  if (1.0 - std::abs(r) < 1e-6) return jacobi_eigenvalues(m);
  const double phi = std::acos(r) / 3.0;
  const double hi = q + 2.0 * p * std::cos(phi);
  const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  return {lo, 3.0 * q - hi - lo, hi};
}

}  // namespace detail

/// Eigenvalues of a symmetric matrix (N <= 3), ascending.
template <std::size_t N>
std::array<double, N> sym_eigenvalues(const Mat<N>& m) {
  static_assert(N >= 1 && N <= 3, "closed-form eigenvalues cover n <= 3");
  if (!is_symmetric(m)) throw AsymmetricInput("matrix is not symmetric within 1e-12");
  return detail::closed_form_eigenvalues(m);
}

template <std::size_t N>
double lambda_min_sym(const Mat<N>& m) {
  return sym_eigenvalues(m).front();
}

template <std::size_t N>
double lambda_max_sym(const Mat<N>& m) {
  return sym_eigenvalues(m).back();
}

template <std::size_t N>
double norm2(const std::array<double, N>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

template <std::size_t N>
double quad_form(const Mat<N>& m, const std::array<double, N>& z) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) s += z[i] * m[i][j] * z[j];
  return s;
}

inline Mat2 mul(const Mat2& a, const Mat2& b) {
  return {{{a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]},
           {a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]}}};
}

/// Spectral norm of a 2x2 matrix.
inline double spectral_norm(const Mat2& a) {
  const Mat2 ata{{{a[0][0] * a[0][0] + a[1][0] * a[1][0], a[0][0] * a[0][1] + a[1][0] * a[1][1]},
                  {a[0][1] * a[0][0] + a[1][1] * a[1][0], a[0][1] * a[0][1] + a[1][1] * a[1][1]}}};
  const double mean = 0.5 * (ata[0][0] + ata[1][1]);
  const double half = 0.5 * (ata[0][0] - ata[1][1]);
  return std::sqrt(mean + std::sqrt(half * half + ata[0][1] * ata[0][1]));
}

/// exp(a) by scaling and squaring with a degree-16 Taylor core.
inline Mat2 expm(const Mat2& a) {
  const double norm = std::abs(a[0][0]) + std::abs(a[0][1]) + std::abs(a[1][0]) + std::abs(a[1][1]);
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  const Mat2 s{{{a[0][0] * scale, a[0][1] * scale}, {a[1][0] * scale, a[1][1] * scale}}};
  Mat2 result{{{1.0, 0.0}, {0.0, 1.0}}};
  Mat2 term = result;
  for (int k = 1; k <= 16; ++k) {
    term = mul(term, s);
    for (auto& row : term)
      for (double& v : row) v /= k;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) result[i][j] += term[i][j];
  }
  for (int i = 0; i < squarings; ++i) result = mul(result, result);
  return result;
}

}  // namespace hybdiff
