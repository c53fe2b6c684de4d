#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "evans/errors.hpp"

namespace evans::quad {

inline constexpr int kMaxDepth = 40;

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
  if (std::abs(delta) <= 15.0 * tol || std::abs(delta) <= floor) return left + right + delta / 15.0;
  if (depth >= kMaxDepth) throw NumericalError("adaptive Simpson: refinement depth cap reached");
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, 0);
}

/// Splits [a, b] into panels no wider than max_panel before refining, so
/// narrow features cannot hide between the first few samples. The tolerance
/// is shared among panels in proportion to their width.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12, double max_panel = 1.0) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, tol, max_panel);
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == panels) ? b : a + (i + 1) * width;
    sum += adaptive_simpson(f, lo, hi, tol / panels);
  }
  return sum;
}

/// n-point Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration
/// on P_n from the Chebyshev initial guesses.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre_rule(int n) {
  if (n < 1) throw DomainError("gauss_legendre_rule: n must be positive");
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

/// Fixed 16-point Gauss-Legendre rule on [a, b]; for short panels of
/// smooth integrands this is accurate to rounding.
template <class F>
double gauss16(F&& f, double a, double b) {
  static const GaussRule rule = gauss_legendre_rule(16);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

}  // namespace evans::quad
