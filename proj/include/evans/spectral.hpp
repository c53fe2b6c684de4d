#pragma once

// Per-lambda spectral data of the linearised eigenvalue problem
//   y' = A(xi; lambda) y,   A = [[0, 1], [lambda - f'(U(xi)), -c]],
// and the coordinates in which the dominant exponential is factored out.

#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "evans/errors.hpp"
#include "evans/linalg.hpp"
#include "evans/method.hpp"
#include "evans/model.hpp"

namespace evans {

inline constexpr double kSqrt3 = 1.7320508075688772935;

/// Principal square root with Re >= 0; on the cut (Re = 0) Im >= 0.
/// Used for kappa and for lambda^(1/2) alike so the branches agree.
inline cplx principal_sqrt(cplx z) {
  cplx r = std::sqrt(z);
  if (r.real() == 0.0 && r.imag() < 0.0) r = -r;
  return r;
}

inline std::string format_lambda(cplx lambda) {
  std::ostringstream os;
  os.precision(17);
  os << lambda.real() << (lambda.imag() < 0 ? "-" : "+") << std::abs(lambda.imag()) << "i";
  return os.str();
}

struct SpectralFrame {
  cplx lambda;
  cplx kappa_minus;
  cplx kappa_plus;
  /// mu_-^[1], mu_-^[2], mu_+^[1], mu_+^[2].
  std::array<cplx, 4> mu;
  C2Matrix B_minus;
  C2Matrix B_plus;
  double speed = 0.0;
  bool admissible = false;

  cplx kappa(Side s) const { return s == Side::minus ? kappa_minus : kappa_plus; }
  cplx mu1(Side s) const { return s == Side::minus ? mu[0] : mu[2]; }
  cplx mu2(Side s) const { return s == Side::minus ? mu[1] : mu[3]; }
  const C2Matrix& B(Side s) const { return s == Side::minus ? B_minus : B_plus; }
  /// Exponent factored out of the decaying solution: mu_-^[1] on the left,
  /// mu_+^[2] on the right.
  cplx boundary_exponent(Side s) const { return s == Side::minus ? mu[0] : mu[3]; }
};

inline SpectralFrame build_frame(const ReactionModel& model, cplx lambda) {
  const double c = model.speed;
  SpectralFrame f;
  f.lambda = lambda;
  f.speed = c;
  f.kappa_minus = principal_sqrt(c * c + 4.0 * (lambda - model.fprime_minus));
  f.kappa_plus = principal_sqrt(c * c + 4.0 * (lambda - model.fprime_plus));
  f.mu = {0.5 * (-c + f.kappa_minus), 0.5 * (-c - f.kappa_minus), 0.5 * (-c + f.kappa_plus),
          0.5 * (-c - f.kappa_plus)};
  f.B_minus = {1.0, 1.0, f.mu[0], f.mu[1]};
  f.B_plus = {1.0, 1.0, f.mu[2], f.mu[3]};
  f.admissible = f.kappa_minus.real() > 0.0 && f.kappa_plus.real() > 0.0;
  return f;
}

inline void require_admissible(const SpectralFrame& f) {
  if (!f.admissible)
    throw DomainError("lambda = " + format_lambda(f.lambda) + " is not admissible (needs Re kappa_- > 0 and Re kappa_+ > 0)");
}

/// A(xi; lambda) of the original first-order system.
inline C2Matrix raw_generator(const ReactionModel& model, cplx lambda, double xi) {
  return {0.0, 1.0, lambda - model.fprime_along_wave(xi), -model.speed};
}

/// Generator of the transformed system: B^{-1} A(xi) B - mu I with
/// mu = mu_-^[1] (minus) or mu_+^[2] (plus), written out in phi and kappa.
inline C2Matrix transformed_generator(const ReactionModel& model, const SpectralFrame& frame, Side side, double xi) {
  require_admissible(frame);
  const cplx k = frame.kappa(side);
  const cplx p = model.phi(side, xi) / k;
  if (side == Side::minus) return {-p, -p, p, -k + p};
  return {k - p, -p, p, p};
}

/// Large-kappa expansion of the transformed decaying solution, truncated
/// after the kappa^-order terms.
inline C2Vector boundary_layer_solution(const ReactionModel& model, const SpectralFrame& frame, Side side, double xi,
                                        int order) {
  require_admissible(frame);
  if (order < 0 || order > 2) throw DomainError("boundary_layer_solution: order must be 0, 1 or 2");
  const cplx k = frame.kappa(side);
  cplx slow = 1.0, fast = 0.0;
  if (order >= 1) {
    const double Phi = side == Side::minus ? Phi_minus(model, xi) : Phi_plus(model, xi);
    slow -= Phi / k;
    if (order >= 2) {
      slow += 0.5 * Phi * Phi / (k * k);
      fast = model.phi(side, xi) / (k * k);
    }
  }
  return side == Side::minus ? C2Vector{slow, fast} : C2Vector{fast, slow};
}

/// Leading kappa-expansion of the left-side transformed one-step matrix in
/// the stiff regime, with exponentially small terms dropped.
///
/// midpoint: exp(h Abar_-(xi_k + h/2));
/// magnus4:  exp(Omega_k) with alpha_k, beta_k from the two Gauss points
///           and chi_k = alpha_k - beta_k^2.
inline C2Matrix onestep_stiff_expansion(const ReactionModel& model, const SpectralFrame& frame, Method method,
                                        double xi_k, double h) {
  require_admissible(frame);
  if (!(h > 0.0)) throw DomainError("onestep_stiff_expansion: step must be positive");
  const cplx k = frame.kappa_minus;
  if ((h * k).real() < 5.0)
    throw DomainError("onestep_stiff_expansion: Re(h kappa) = " + std::to_string((h * k).real()) +
                      " is outside the stiff sector (needs >= 5)");
  const cplx k2 = k * k;
  switch (method) {
    case Method::midpoint: {
      const double p = model.phi_minus(xi_k + 0.5 * h);
      return {1.0 - h * p / k + h * h * p * p / (2.0 * k2), -p / k2, p / k2, -p * p / (k2 * k2)};
    }
    case Method::magnus4: {
      const double p1 = model.phi_minus(xi_k + (0.5 - kSqrt3 / 6.0) * h);
      const double p2 = model.phi_minus(xi_k + (0.5 + kSqrt3 / 6.0) * h);
      const double alpha = 0.5 * (p1 + p2);
      const double beta = -kSqrt3 / 12.0 * h * (p1 - p2);
      const double chi = alpha - beta * beta;
      return {1.0 - h * chi / k + (h * h * chi * chi - 2.0 * beta * beta) / (2.0 * k2), beta / k, beta / k,
              beta * beta / k2};
    }
    case Method::gauss_legendre4:
      break;
  }
  throw DomainError("onestep_stiff_expansion: only midpoint and magnus4 have closed-form expansions");
}

}  // namespace evans
