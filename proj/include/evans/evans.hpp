#pragma once

// Evans function D(lambda) = det[y_-(0) | y_+(0)] by two-sided shooting, and
// its large-|lambda| expansion.

#include "evans/integrators.hpp"
#include "evans/linalg.hpp"
#include "evans/model.hpp"
#include "evans/spectral.hpp"

namespace evans {

struct EvansResult {
  cplx lambda;
  cplx value;
  C2Vector minus_final;
  C2Vector plus_final;
  GridSpec grid;
  Method method = Method::magnus4;
  Coordinates coordinates = Coordinates::transformed;
};

/// (B_- ybar_-) ^ (B_+ ybar_+) expanded in kappa_-+:
///   1/2 (k- - k+)(v- v+ - u- u+) + 1/2 (k- + k+)(v- u+ - u- v+).
inline cplx combine(const SpectralFrame& frame, const C2Vector& minus_final, const C2Vector& plus_final) {
  require_admissible(frame);
  const cplx km = frame.kappa_minus, kp = frame.kappa_plus;
  const cplx um = minus_final.u, vm = minus_final.v;
  const cplx up = plus_final.u, vp = plus_final.v;
  return 0.5 * (km - kp) * (vm * vp - um * up) + 0.5 * (km + kp) * (vm * up - um * vp);
}

inline EvansResult evaluate_evans(const ReactionModel& model, cplx lambda, const GridSpec& grid, Method method,
                                  Coordinates coords = Coordinates::transformed) {
  const SpectralFrame frame = build_frame(model, lambda);
  require_admissible(frame);
  EvansResult r;
  r.lambda = lambda;
  r.grid = grid;
  r.method = method;
  r.coordinates = coords;
  r.minus_final = propagate(model, frame, grid, method, Side::minus, coords).final_value;
  r.plus_final = propagate(model, frame, grid, method, Side::plus, coords).final_value;
  r.value = coords == Coordinates::transformed ? combine(frame, r.minus_final, r.plus_final)
                                               : wedge(r.minus_final, r.plus_final);
  if (!is_finite(r.value)) throw NumericalError("Evans function is not finite at lambda = " + format_lambda(lambda));
  return r;
}

/// Coefficients of D(lambda) ~ -2 lambda^(1/2) + Phi
///   - 1/4 lambda^(-1/2) (Phi^2 - 2 f'(U_-) - 2 f'(U_+) + c^2).
/// `order` counts the terms kept after the leading one.
struct AsymptoticSeries {
  double Phi_total = 0.0;
  double c = 0.0;
  double fprime_minus = 0.0;
  double fprime_plus = 0.0;
  int order = 2;
};

inline AsymptoticSeries asymptotic_series(const ReactionModel& model, int order = 2) {
  if (order < 0 || order > 2) throw DomainError("asymptotic series: order must be 0, 1 or 2");
  return {quad_potential(model, PotentialKind::Phi_total), model.speed, model.fprime_minus, model.fprime_plus, order};
}

inline cplx asymptotic_evans(const AsymptoticSeries& s, cplx lambda) {
  if (lambda == cplx{0.0}) throw DomainError("asymptotic_evans: lambda must be nonzero");
  if (s.order < 0 || s.order > 2) throw DomainError("asymptotic_evans: order must be 0, 1 or 2");
  const cplx root = principal_sqrt(lambda);
  cplx d = -2.0 * root;
  if (s.order >= 1) d += s.Phi_total;
  if (s.order >= 2)
    d -= 0.25 / root * (s.Phi_total * s.Phi_total - 2.0 * s.fprime_minus - 2.0 * s.fprime_plus + s.c * s.c);
  return d;
}

}  // namespace evans
