#pragma once

// Measured and predicted discretisation errors of the Evans function, the
// per-step error terms behind them, and log-log order fits.

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "evans/errors.hpp"
#include "evans/evans.hpp"
#include "evans/integrators.hpp"
#include "evans/model.hpp"
#include "evans/quadrature.hpp"
#include "evans/spectral.hpp"

namespace evans {

// Reference values ----------------------------------------------------------

inline constexpr double kReferenceTolerance = 1e-11;
inline constexpr int kReferenceMaxDoublings = 8;

inline int reference_start_steps(double L) { return std::max(256, static_cast<int>(std::ceil(8.0 * L))); }

/// Step-halving with `method` at fixed L until successive values agree to
/// tol * max(1, |D|); the default is magnus4 with tol = 1e-11.
inline cplx reference_evans(const ReactionModel& model, cplx lambda, double L, Method method = Method::magnus4,
                            double tol = kReferenceTolerance) {
  require_admissible(build_frame(model, lambda));
  int n = reference_start_steps(L);
  cplx previous = evaluate_evans(model, lambda, GridSpec::from_steps(L, n), method).value;
  for (int d = 0; d < kReferenceMaxDoublings; ++d) {
    n *= 2;
    const cplx current = evaluate_evans(model, lambda, GridSpec::from_steps(L, n), method).value;
    if (std::abs(current - previous) < tol * std::max(1.0, std::abs(current))) return current;
    previous = current;
  }
  throw NumericalError("reference Evans value did not converge at lambda = " + format_lambda(lambda) + " after " +
                       std::to_string(kReferenceMaxDoublings) + " doublings");
}

// Local error terms ---------------------------------------------------------

/// Scalar step coefficients. Unused fields stay zero.
struct LocalErrorTerms {
  Method method = Method::midpoint;
  double gamma = 0.0;  // quadrature defect of the step
  double delta = 0.0;  // midpoint: phi(mid) - phi(end)
  double alpha = 0.0;  // mean of phi at the two Gauss points
  double beta = 0.0;   // -sqrt3/12 h (phi(x1) - phi(x2))
  double chi = 0.0;    // alpha - beta^2
  double La = 0.0;
  double Lb = 0.0;
  double Lc = 0.0;
};

namespace detail {

/// The right-hand problem seen from the left: zeta = -xi, psi(zeta) =
/// phi_+(-zeta), Psi(zeta) = Phi_+(-zeta). Running the plus side backwards
/// from L is then the same as running this mirrored problem forwards.
struct MirroredPotential {
  const ReactionModel* model;
  Side side;
  double operator()(double zeta) const {
    return side == Side::minus ? model->phi_minus(zeta) : model->phi_plus(-zeta);
  }
  double primitive(double zeta) const {
    return side == Side::minus ? Phi_minus(*model, zeta) : Phi_plus(*model, -zeta);
  }
};

}  // namespace detail

/// Coefficients of step k starting at xi_k with step size h > 0. On the plus
/// side xi_k is the right end of the step and the terms are those of the
/// mirrored problem.
inline LocalErrorTerms local_error_terms(const ReactionModel& model, const SpectralFrame& frame, Method method,
                                         double xi_k, double h, Side side = Side::minus) {
  require_admissible(frame);
  if (!(h > 0.0)) throw DomainError("local_error_terms: h must be positive");
  const detail::MirroredPotential psi{&model, side};
  const double z = side == Side::minus ? xi_k : -xi_k;
  const double exact = quad::gauss16(psi, z, z + h);
  const double p1 = psi(z + kGaussC1 * h), p2 = psi(z + kGaussC2 * h);

  LocalErrorTerms t;
  t.method = method;
  t.alpha = 0.5 * (p1 + p2);
  t.beta = -kSqrt3 / 12.0 * h * (p1 - p2);
  t.chi = t.alpha - t.beta * t.beta;
  switch (method) {
    case Method::midpoint: {
      const double pm = psi(z + 0.5 * h);
      t.gamma = exact - h * pm;
      t.delta = pm - psi(z + h);
      break;
    }
    case Method::magnus4:
      t.gamma = exact - h * t.chi;
      break;
    case Method::gauss_legendre4:
      t.La = exact - h * t.alpha;
      t.Lb = -t.La * (0.5 * t.La + psi.primitive(z) + h * t.alpha);
      // phi(xi_k) + 12 beta / h - phi(xi_k+1); 12 beta / h = sqrt3 (p2 - p1).
      t.Lc = psi(z) - psi(z + h) + 12.0 * t.beta / h;
      break;
  }
  return t;
}

// Predicted global error ----------------------------------------------------

inline constexpr double kStiffSector = 5.0;

/// Leading-order transformed global error after k steps. Requires
/// Re(h kappa) >= 5 on the requested side.
inline C2Vector predicted_global_error(const ReactionModel& model, const SpectralFrame& frame, const GridSpec& grid,
                                       Method method, Side side, int k) {
  require_admissible(frame);
  if (k < 0 || k > grid.N) throw DomainError("predicted_global_error: node index out of range");
  const double h = grid.h();
  const cplx kappa = frame.kappa(side);
  if ((h * kappa).real() < kStiffSector)
    throw DomainError("predicted_global_error: Re(h kappa) = " + std::to_string((h * kappa).real()) +
                      " is outside the stiff sector (needs >= 5)");
  if (k == 0) return {};

  cplx slow = 0.0, fast = 0.0;
  double sum_a = 0.0, sum_b = 0.0, sum_c = 0.0, sum_gamma = 0.0;
  LocalErrorTerms last;
  for (int j = 0; j < k; ++j) {
    const double xj = grid.node(side, j);
    last = local_error_terms(model, frame, method, xj, h, side);
    sum_gamma += last.gamma;
    // Inner sum over i < j uses the La accumulated so far.
    sum_b += last.Lb - h * last.alpha * sum_a;
    sum_a += last.La;
    sum_c += last.Lc;
  }
  switch (method) {
    case Method::midpoint:
      slow = sum_gamma / kappa;
      fast = last.delta / (kappa * kappa);
      break;
    case Method::magnus4:
      slow = sum_gamma / kappa;
      fast = last.beta / kappa;
      break;
    case Method::gauss_legendre4:
      slow = sum_a / kappa + sum_b / (kappa * kappa);
      fast = sum_c / (kappa * kappa);
      break;
  }
  return side == Side::minus ? C2Vector{slow, fast} : C2Vector{fast, slow};
}

// Measured global and local errors ------------------------------------------

inline constexpr int kReferenceSubsteps = 32;

/// Errors of one side's propagation against a magnus4 run with `substeps`
/// steps per grid interval: E_k = y_k - y(xi_k) and
/// L_k = Psi_k y(xi_k) - y(xi_{k+1}), so E_{k+1} = Psi_k E_k + L_k.
struct ErrorTrajectory {
  Side side = Side::minus;
  std::vector<double> nodes;
  std::vector<C2Vector> numerical;
  std::vector<C2Vector> exact;
  std::vector<C2Matrix> step_maps;
  std::vector<C2Vector> global;
  std::vector<C2Vector> local;
};

inline ErrorTrajectory error_trajectory(const ReactionModel& model, const SpectralFrame& frame, const GridSpec& grid,
                                        Method method, Side side, int substeps = kReferenceSubsteps) {
  const auto num = propagate(model, frame, grid, method, side, Coordinates::transformed);
  const auto ref = propagate(model, frame, grid, Method::magnus4, side, Coordinates::transformed, substeps);
  const Generator gen = make_generator(model, frame, side, Coordinates::transformed);
  const double h = side == Side::minus ? grid.h() : -grid.h();

  ErrorTrajectory out;
  out.side = side;
  out.nodes = num.nodes;
  out.numerical = num.trajectory;
  out.exact = ref.trajectory;
  for (int k = 0; k <= grid.N; ++k) out.global.push_back(num.trajectory[k] - ref.trajectory[k]);
  for (int k = 0; k < grid.N; ++k) {
    out.step_maps.push_back(step_map(method, gen, grid.node(side, k), h));
    out.local.push_back(out.step_maps.back() * ref.trajectory[k] - ref.trajectory[k + 1]);
  }
  return out;
}

// Evans-function error ------------------------------------------------------

enum class SumRule { midpoint_sum, gl_pair_sum };

namespace detail {

inline double sum_defect(const ReactionModel& model, const GridSpec& grid, SumRule rule) {
  const double h = grid.h();
  double sum = 0.0;
  for (int j = -grid.N; j < grid.N; ++j) {
    const double x = j * h;
    const auto& f = j < 0 ? model.phi_minus : model.phi_plus;
    if (rule == SumRule::midpoint_sum)
      sum += h * f(x + 0.5 * h);
    else
      sum += 0.5 * h * (f(x + kGaussC1 * h) + f(x + kGaussC2 * h));
  }
  const double integral = quad::integrate(model.phi_minus, -grid.L, 0.0, 1e-14) +
                          quad::integrate(model.phi_plus, 0.0, grid.L, 1e-14);
  return sum - integral;
}

}  // namespace detail

/// |h sum phi(sample points) - integral over [-L, L] of phi|, with phi_- on
/// the left half and phi_+ on the right half.
inline double euler_maclaurin_residual(const ReactionModel& model, const GridSpec& grid, SumRule rule) {
  return std::abs(detail::sum_defect(model, grid, rule));
}

/// Leading Evans-function error D_num - D: the midpoint-sum defect for the
/// exponential midpoint rule, -h^4/144 times the integral of phi'^2 for
/// magnus4, and nothing for gl4 (only an order bound is known).
inline std::optional<cplx> predict_evans_error(const ReactionModel& model, cplx lambda, const GridSpec& grid,
                                               Method method) {
  require_admissible(build_frame(model, lambda));
  const double h = grid.h();
  switch (method) {
    case Method::midpoint:
      return cplx{detail::sum_defect(model, grid, SumRule::midpoint_sum)};
    case Method::magnus4:
      return cplx{-std::pow(h, 4) / 144.0 * quad_potential(model, PotentialKind::phi_prime_sq_total)};
    case Method::gauss_legendre4:
      break;
  }
  return std::nullopt;
}

struct ErrorReport {
  Method method = Method::magnus4;
  cplx lambda;
  GridSpec grid;
  cplx value;
  cplx reference;
  cplx measured_E_D;
  std::optional<cplx> predicted_E_D;
  std::optional<double> ratio;
};

/// Error against a supplied reference value at the same L.
inline ErrorReport measure_evans_error(const ReactionModel& model, cplx lambda, const GridSpec& grid, Method method,
                                       cplx reference) {
  ErrorReport r;
  r.method = method;
  r.lambda = lambda;
  r.grid = grid;
  r.value = evaluate_evans(model, lambda, grid, method).value;
  r.reference = reference;
  r.measured_E_D = r.value - reference;
  r.predicted_E_D = predict_evans_error(model, lambda, grid, method);
  if (r.predicted_E_D && std::abs(*r.predicted_E_D) > 0.0) r.ratio = (r.measured_E_D / *r.predicted_E_D).real();
  return r;
}

inline ErrorReport measure_evans_error(const ReactionModel& model, cplx lambda, const GridSpec& grid, Method method) {
  return measure_evans_error(model, lambda, grid, method, reference_evans(model, lambda, grid.L));
}

// Order fits ----------------------------------------------------------------

struct OrderFit {
  std::vector<std::pair<double, double>> samples;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

/// Least-squares line through (log x, log e).
inline OrderFit fit_order(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 3) throw DomainError("fit_order: need at least 3 samples");
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, e] : samples) {
    if (!(x > 0.0) || !(e > 0.0) || !std::isfinite(x) || !std::isfinite(e))
      throw DomainError("fit_order: samples must be positive and finite");
    sx += std::log(x);
    sy += std::log(e);
  }
  const double n = static_cast<double>(samples.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, e] : samples) {
    sxx += (std::log(x) - mx) * (std::log(x) - mx);
    sxy += (std::log(x) - mx) * (std::log(e) - my);
  }
  if (!(sxx > 1e-24)) throw DomainError("fit_order: abscissae are degenerate");
  OrderFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (const auto& [x, e] : samples)
    f.residual = std::max(f.residual, std::abs(std::log(e) - (f.intercept + f.slope * std::log(x))));
  f.samples = std::move(samples);
  return f;
}

}  // namespace evans
