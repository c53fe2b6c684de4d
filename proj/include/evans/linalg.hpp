#pragma once

// Fixed-size complex 2-vector / 2x2-matrix arithmetic, the 2x2 matrix
// exponential, and a pivoted 4x4 solver for implicit Runge-Kutta stages.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "evans/errors.hpp"

namespace evans {

using cplx = std::complex<double>;

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

struct C2Vector {
  cplx u{};
  cplx v{};

  constexpr C2Vector() = default;
  constexpr C2Vector(cplx u_, cplx v_) : u(u_), v(v_) {}

  cplx& operator[](int i) { return i == 0 ? u : v; }
  const cplx& operator[](int i) const { return i == 0 ? u : v; }

  C2Vector& operator+=(const C2Vector& o) { u += o.u; v += o.v; return *this; }
  C2Vector& operator-=(const C2Vector& o) { u -= o.u; v -= o.v; return *this; }
  C2Vector& operator*=(cplx s) { u *= s; v *= s; return *this; }

  double max_abs() const { return std::max(std::abs(u), std::abs(v)); }
  bool finite() const { return is_finite(u) && is_finite(v); }

  friend C2Vector operator+(C2Vector a, const C2Vector& b) { return a += b; }
  friend C2Vector operator-(C2Vector a, const C2Vector& b) { return a -= b; }
  friend C2Vector operator-(const C2Vector& a) { return {-a.u, -a.v}; }
  friend C2Vector operator*(cplx s, C2Vector a) { return a *= s; }
  friend C2Vector operator*(C2Vector a, cplx s) { return a *= s; }
  friend bool operator==(const C2Vector&, const C2Vector&) = default;
};

/// Row-major 2x2 complex matrix.
struct C2Matrix {
  cplx a11{}, a12{}, a21{}, a22{};

  constexpr C2Matrix() = default;
  constexpr C2Matrix(cplx m11, cplx m12, cplx m21, cplx m22) : a11(m11), a12(m12), a21(m21), a22(m22) {}

  static constexpr C2Matrix identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr C2Matrix diag(cplx d1, cplx d2) { return {d1, 0.0, 0.0, d2}; }
  /// Matrix with the given vectors as columns.
  static constexpr C2Matrix columns(const C2Vector& c1, const C2Vector& c2) { return {c1.u, c2.u, c1.v, c2.v}; }

  C2Vector col(int j) const { return j == 0 ? C2Vector{a11, a21} : C2Vector{a12, a22}; }

  cplx trace() const { return a11 + a22; }
  cplx det() const { return a11 * a22 - a12 * a21; }
  double max_abs() const {
    return std::max(std::max(std::abs(a11), std::abs(a12)), std::max(std::abs(a21), std::abs(a22)));
  }
  /// Maximum absolute row sum.
  double norm_inf() const {
    return std::max(std::abs(a11) + std::abs(a12), std::abs(a21) + std::abs(a22));
  }
  bool finite() const { return is_finite(a11) && is_finite(a12) && is_finite(a21) && is_finite(a22); }

  C2Matrix inverse() const {
    const cplx d = det();
    if (d == cplx{0.0}) throw NumericalError("inverse of singular 2x2 matrix");
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }

  C2Matrix& operator+=(const C2Matrix& o) { a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22; return *this; }
  C2Matrix& operator-=(const C2Matrix& o) { a11 -= o.a11; a12 -= o.a12; a21 -= o.a21; a22 -= o.a22; return *this; }
  C2Matrix& operator*=(cplx s) { a11 *= s; a12 *= s; a21 *= s; a22 *= s; return *this; }

  friend C2Matrix operator+(C2Matrix a, const C2Matrix& b) { return a += b; }
  friend C2Matrix operator-(C2Matrix a, const C2Matrix& b) { return a -= b; }
  friend C2Matrix operator-(const C2Matrix& a) { return {-a.a11, -a.a12, -a.a21, -a.a22}; }
  friend C2Matrix operator*(cplx s, C2Matrix a) { return a *= s; }
  friend C2Matrix operator*(C2Matrix a, cplx s) { return a *= s; }
  friend C2Matrix operator*(const C2Matrix& x, const C2Matrix& y) {
    return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
            x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
  }
  friend C2Vector operator*(const C2Matrix& m, const C2Vector& y) {
    return {m.a11 * y.u + m.a12 * y.v, m.a21 * y.u + m.a22 * y.v};
  }
  friend bool operator==(const C2Matrix&, const C2Matrix&) = default;
};

inline C2Matrix commutator(const C2Matrix& x, const C2Matrix& y) { return x * y - y * x; }

/// Determinant of the matrix with columns a and b.
inline cplx wedge(const C2Vector& a, const C2Vector& b) { return a.u * b.v - a.v * b.u; }

/// Eigen-decomposition of a 2x2 matrix.
///
/// lambda1 carries the principal square root of the discriminant, so
/// Re lambda1 >= Re lambda2. Columns of V are eigenvectors scaled to a unit
/// first entry whenever that entry is not negligible (otherwise a unit second
/// entry). When |discriminant| is tiny relative to the matrix the
/// eigenvectors are ill-conditioned and V should not be trusted.
struct Eigen2 {
  cplx lambda1;
  cplx lambda2;
  C2Matrix V;
  cplx discriminant;
};

namespace detail {

inline C2Vector null_vector(const C2Matrix& m, cplx lambda) {
  // Either row of (M - lambda I) annihilates the eigenvector; use the larger one.
  const cplx p1 = m.a11 - lambda, q1 = m.a12;
  const cplx p2 = m.a21, q2 = m.a22 - lambda;
  const bool first = std::abs(p1) + std::abs(q1) >= std::abs(p2) + std::abs(q2);
  const cplx p = first ? p1 : p2;
  const cplx q = first ? q1 : q2;
  if (std::abs(q) + std::abs(p) == 0.0) return {1.0, 0.0};
  // (x, y) = (q, -p) solves p x + q y = 0.
  if (std::abs(q) > 1e-13 * std::abs(p)) return {1.0, -p / q};
  return {0.0, 1.0};
}

}  // namespace detail

inline Eigen2 eigen2(const C2Matrix& m) {
  const cplx half_trace = 0.5 * m.trace();
  const cplx diff = m.a11 - m.a22;
  const cplx disc = diff * diff + 4.0 * m.a12 * m.a21;
  const cplx delta = 0.5 * std::sqrt(disc);
  // Compute the root of larger magnitude directly, the other from the
  // determinant, so a small eigenvalue next to a stiff one keeps its digits.
  const cplx plus = half_trace + delta;
  const cplx minus = half_trace - delta;
  cplx l1 = plus, l2 = minus;
  if (std::abs(plus) >= std::abs(minus)) {
    if (plus != cplx{0.0}) l2 = m.det() / plus;
  } else {
    l1 = m.det() / minus;
  }
  Eigen2 out;
  out.lambda1 = l1;
  out.lambda2 = l2;
  out.discriminant = disc;
  out.V = C2Matrix::columns(detail::null_vector(m, l1), detail::null_vector(m, l2));
  return out;
}

/// Relative eigenvalue separation below which expm2 leaves the spectral path.
inline constexpr double kDegeneracyThreshold = 1e-6;

namespace detail {

// exp(M) = e^{l1} P1 + e^{l2} P2 with spectral projectors
// P1 = (M - l2 I)/(l1 - l2), P2 = I - P1.
inline C2Matrix expm2_spectral(const C2Matrix& m, const Eigen2& e) {
  const cplx l1 = e.lambda1, l2 = e.lambda2;
  const cplx gap = l1 - l2;
  // Each diagonal entry of M - l I has two expressions because
  // trace(M) = l1 + l2 (e.g. a11 - l2 = l1 - a22); subtract the pair of
  // smaller operands to limit cancellation.
  auto diff = [](cplx x1, cplx y1, cplx x2, cplx y2) {
    return std::max(std::abs(x1), std::abs(y1)) <= std::max(std::abs(x2), std::abs(y2)) ? x1 - y1 : x2 - y2;
  };
  const C2Matrix p1 = C2Matrix{diff(m.a11, l2, l1, m.a22), m.a12, m.a21, diff(m.a22, l2, l1, m.a11)} * (1.0 / gap);
  const C2Matrix p2 = C2Matrix{diff(m.a11, l1, l2, m.a22), m.a12, m.a21, diff(m.a22, l1, l2, m.a11)} * (-1.0 / gap);
  return std::exp(l1) * p1 + std::exp(l2) * p2;
}

inline C2Matrix expm2_series(const C2Matrix& m) {
  constexpr int kDegree = 12;
  constexpr int kMaxSquarings = 1100;
  double norm = m.norm_inf();
  int squarings = 0;
  while (norm > 0.5) {
    norm *= 0.5;
    if (++squarings > kMaxSquarings) throw NumericalError("expm2: scaling did not reduce the norm");
  }
  const C2Matrix x = m * std::ldexp(1.0, -squarings);
  C2Matrix sum = C2Matrix::identity();
  C2Matrix term = C2Matrix::identity();
  for (int k = 1; k <= kDegree; ++k) {
    term = (term * x) * (1.0 / k);
    sum += term;
  }
  if (!(term.max_abs() <= 1e-12 * sum.max_abs())) throw NumericalError("expm2: truncated series did not converge");
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

}  // namespace detail

/// Matrix exponential of a 2x2 complex matrix.
///
/// Uses the spectral projectors when the eigenvalues are separated by more
/// than kDegeneracyThreshold times the max-entry norm, and scaling and
/// squaring of a degree-12 Taylor polynomial otherwise.
inline C2Matrix expm2(const C2Matrix& m) {
  if (!m.finite()) throw NumericalError("expm2: non-finite input");
  const Eigen2 e = eigen2(m);
  if (std::abs(e.lambda1 - e.lambda2) > kDegeneracyThreshold * m.max_abs()) {
    C2Matrix r = detail::expm2_spectral(m, e);
    if (!r.finite()) throw NumericalError("expm2: result overflowed");
    return r;
  }
  return detail::expm2_series(m);
}

using Matrix4 = std::array<std::array<cplx, 4>, 4>;
using Vector4 = std::array<cplx, 4>;

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Throws NumericalError when a pivot falls below 1e-14 * max|A_ij|.
inline Vector4 solve4x4(Matrix4 a, Vector4 b) {
  double scale = 0.0;
  for (const auto& row : a)
    for (const cplx& x : row) scale = std::max(scale, std::abs(x));
  const double tiny = 1e-14 * scale;
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (!(std::abs(a[piv][col]) > tiny)) throw NumericalError("singular 4x4 system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < 4; ++r) {
      const cplx f = a[r][col] / a[col][col];
      if (f == cplx{0.0}) continue;
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vector4 x{};
  for (int r = 3; r >= 0; --r) {
    cplx s = b[r];
    for (int c = r + 1; c < 4; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

/// The stage system of a two-stage method for a 2-dimensional ODE is a
/// 2n = 4 block system.
inline Vector4 solve2n(const Matrix4& a, const Vector4& b) { return solve4x4(a, b); }

}  // namespace evans
