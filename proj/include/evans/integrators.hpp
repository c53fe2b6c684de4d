#pragma once

// One-step maps for y' = G(xi) y and two-sided propagation towards xi = 0.
// A negative step runs a scheme backwards; the Gauss-Legendre abscissae
// xi_k + c_i h then mirror automatically.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "evans/errors.hpp"
#include "evans/linalg.hpp"
#include "evans/method.hpp"
#include "evans/model.hpp"
#include "evans/spectral.hpp"

namespace evans {

/// Uniform grid on [-L, 0] (and mirrored on [0, L]) with N steps.
struct GridSpec {
  double L = 1.0;
  int N = 1;

  static GridSpec from_steps(double L, int N) {
    if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("grid: L must be positive and finite");
    if (N < 1) throw DomainError("grid: N must be at least 1");
    return {L, N};
  }

  /// Grid with step as close to h as possible; N = ceil(L/h), so the
  /// realised step is L/N <= h. `rounded` reports whether L/h was not integral.
  static GridSpec from_step(double L, double h, bool* rounded = nullptr) {
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("grid: h must be positive and finite");
    const double ratio = L / h;
    const double nearest = std::round(ratio);
    const bool integral = std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio);
    const double n = integral ? nearest : std::ceil(ratio);
    if (n > 1e9) throw DomainError("grid: L/h is too large");
    if (rounded) *rounded = !integral;
    return from_steps(L, std::max(1, static_cast<int>(n)));
  }

  double h() const { return L / N; }

  /// Node k of the given side: -L ... 0 on the left, L ... 0 on the right.
  double node(Side side, int k) const {
    const double x = L * static_cast<double>(N - k) / N;
    return side == Side::minus ? -x : x;
  }

  /// Offsets (1/2 -+ sqrt3/6) h of the two Gauss-Legendre points.
  std::array<double, 2> gauss_offsets() const { return {(0.5 - kSqrt3 / 6.0) * h(), (0.5 + kSqrt3 / 6.0) * h()}; }
};

enum class Coordinates { raw, transformed };

using Generator = std::function<C2Matrix(double)>;

inline constexpr double kGaussC1 = 0.5 - kSqrt3 / 6.0;
inline constexpr double kGaussC2 = 0.5 + kSqrt3 / 6.0;

// Step maps ---------------------------------------------------------------

inline C2Matrix midpoint_map(const Generator& g, double xi_k, double h) { return expm2(h * g(xi_k + 0.5 * h)); }

/// exp(Omega) with Omega = h/2 (A1 + A2) - sqrt3/12 h^2 [A1, A2].
inline C2Matrix magnus4_exponent(const Generator& g, double xi_k, double h) {
  const C2Matrix a1 = g(xi_k + kGaussC1 * h);
  const C2Matrix a2 = g(xi_k + kGaussC2 * h);
  return (0.5 * h) * (a1 + a2) - (kSqrt3 / 12.0 * h * h) * commutator(a1, a2);
}

inline C2Matrix magnus4_map(const Generator& g, double xi_k, double h) { return expm2(magnus4_exponent(g, xi_k, h)); }

namespace detail {

// Stage system of the two-stage Gauss-Legendre method for a linear ODE:
//   s1 = A1 (y + h/4 s1 + (1/4 - sqrt3/6) h s2)
//   s2 = A2 (y + (1/4 + sqrt3/6) h s1 + h/4 s2)
// Unknowns ordered (s1.u, s1.v, s2.u, s2.v).
struct GlStages {
  Matrix4 lhs;
  C2Matrix a1, a2;
};

inline GlStages gl4_stage_system(const Generator& g, double xi_k, double h) {
  constexpr double s1 = 0.25 - kSqrt3 / 6.0;
  constexpr double s2 = 0.25 + kSqrt3 / 6.0;
  GlStages st;
  st.a1 = g(xi_k + kGaussC1 * h);
  st.a2 = g(xi_k + kGaussC2 * h);
  auto block = [&](int r0, int c0, const C2Matrix& m, cplx diag) {
    st.lhs[r0][c0] = diag - m.a11;
    st.lhs[r0][c0 + 1] = -m.a12;
    st.lhs[r0 + 1][c0] = -m.a21;
    st.lhs[r0 + 1][c0 + 1] = diag - m.a22;
  };
  block(0, 0, (0.25 * h) * st.a1, 1.0);
  block(0, 2, (s1 * h) * st.a1, 0.0);
  block(2, 0, (s2 * h) * st.a2, 0.0);
  block(2, 2, (0.25 * h) * st.a2, 1.0);
  return st;
}

inline C2Vector gl4_apply(const GlStages& st, double h, const C2Vector& y, double xi_k) {
  const C2Vector r1 = st.a1 * y, r2 = st.a2 * y;
  Vector4 s;
  try {
    s = solve4x4(st.lhs, {r1.u, r1.v, r2.u, r2.v});
  } catch (const NumericalError&) {
    throw NumericalError("gl4: singular stage system at xi_k = " + std::to_string(xi_k) + ", h = " + std::to_string(h));
  }
  return {y.u + 0.5 * h * (s[0] + s[2]), y.v + 0.5 * h * (s[1] + s[3])};
}

}  // namespace detail

inline C2Matrix gl4_map(const Generator& g, double xi_k, double h) {
  const auto st = detail::gl4_stage_system(g, xi_k, h);
  return C2Matrix::columns(detail::gl4_apply(st, h, {1.0, 0.0}, xi_k), detail::gl4_apply(st, h, {0.0, 1.0}, xi_k));
}

inline C2Matrix step_map(Method method, const Generator& g, double xi_k, double h) {
  switch (method) {
    case Method::midpoint:
      return midpoint_map(g, xi_k, h);
    case Method::magnus4:
      return magnus4_map(g, xi_k, h);
    case Method::gauss_legendre4:
      return gl4_map(g, xi_k, h);
  }
  throw DomainError("unknown method");
}

inline C2Vector step_midpoint(const Generator& g, double xi_k, double h, const C2Vector& y) {
  return midpoint_map(g, xi_k, h) * y;
}

inline C2Vector step_magnus4(const Generator& g, double xi_k, double h, const C2Vector& y) {
  return magnus4_map(g, xi_k, h) * y;
}

inline C2Vector step_gl4(const Generator& g, double xi_k, double h, const C2Vector& y) {
  return detail::gl4_apply(detail::gl4_stage_system(g, xi_k, h), h, y, xi_k);
}

inline C2Vector step(Method method, const Generator& g, double xi_k, double h, const C2Vector& y) {
  switch (method) {
    case Method::midpoint:
      return step_midpoint(g, xi_k, h, y);
    case Method::magnus4:
      return step_magnus4(g, xi_k, h, y);
    case Method::gauss_legendre4:
      return step_gl4(g, xi_k, h, y);
  }
  throw DomainError("unknown method");
}

// Propagation -------------------------------------------------------------

struct PropagationResult {
  Side side = Side::minus;
  Coordinates coordinates = Coordinates::transformed;
  std::vector<double> nodes;
  std::vector<C2Vector> trajectory;
  C2Vector final_value;
};

inline Generator make_generator(const ReactionModel& model, const SpectralFrame& frame, Side side,
                                Coordinates coords) {
  if (coords == Coordinates::raw) {
    const cplx lambda = frame.lambda;
    return [&model, lambda](double xi) { return raw_generator(model, lambda, xi); };
  }
  return [&model, &frame, side](double xi) { return transformed_generator(model, frame, side, xi); };
}

/// Value of the decaying solution at the truncation point xi0 = -+L: the
/// transformed (1,0) / (0,1), or exp(mu xi0) times the matching column of B.
inline C2Vector boundary_value(const SpectralFrame& frame, Side side, Coordinates coords, double xi0) {
  const C2Vector t = side == Side::minus ? C2Vector{1.0, 0.0} : C2Vector{0.0, 1.0};
  if (coords == Coordinates::transformed) return t;
  return std::exp(frame.boundary_exponent(side) * xi0) * (frame.B(side) * t);
}

inline constexpr double kRawOverflow = 1e300;

/// Runs `method` from xi = -L up to 0 (minus) or from L down to 0 (plus),
/// taking `substeps` equal steps per grid interval and recording the
/// solution at the grid nodes.
inline PropagationResult propagate(const ReactionModel& model, const SpectralFrame& frame, const GridSpec& grid,
                                   Method method, Side side, Coordinates coords, int substeps = 1) {
  require_admissible(frame);
  if (substeps < 1) throw DomainError("propagate: substeps must be positive");
  const Generator gen = make_generator(model, frame, side, coords);
  const double sign = side == Side::minus ? 1.0 : -1.0;
  const double h = sign * grid.h() / substeps;

  PropagationResult out;
  out.side = side;
  out.coordinates = coords;
  out.nodes.reserve(grid.N + 1);
  out.trajectory.reserve(grid.N + 1);
  C2Vector y = boundary_value(frame, side, coords, grid.node(side, 0));
  out.nodes.push_back(grid.node(side, 0));
  out.trajectory.push_back(y);
  for (int k = 0; k < grid.N; ++k) {
    const double xk = grid.node(side, k);
    for (int j = 0; j < substeps; ++j) {
      try {
        y = step(method, gen, xk + j * h, h, y);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (lambda = " + format_lambda(frame.lambda) + ")");
      }
    }
    if (coords == Coordinates::raw && !(y.max_abs() <= kRawOverflow))
      throw NumericalError("raw propagation overflowed at lambda = " + format_lambda(frame.lambda) +
                           "; use transformed coordinates");
    if (!y.finite()) throw NumericalError("propagation produced a non-finite value at lambda = " + format_lambda(frame.lambda));
    out.nodes.push_back(grid.node(side, k + 1));
    out.trajectory.push_back(y);
  }
  out.final_value = y;
  return out;
}

}  // namespace evans
