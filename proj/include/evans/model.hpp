#pragma once

// Travelling-wave data for scalar reaction-diffusion fronts
//   u_t = u_xx + f(u),   u(x, t) = U(x - c t),
// reduced to what the linearisation needs: f'(U(xi)) along the wave, its
// limits at -inf / +inf, and the speed c.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <istream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "evans/errors.hpp"
#include "evans/quadrature.hpp"

namespace evans {

enum class Side { minus, plus };

inline const char* to_string(Side s) { return s == Side::minus ? "minus" : "plus"; }

/// How the potentials phi_-/phi_+ approach zero in their own tail.
enum class TailShape {
  exponential,  // |phi| <= A exp(-decay |xi|)
  gaussian,     // |phi| <= A exp(-decay xi^2)
  compact,      // phi vanishes outside [support_lo, support_hi]
};

/// Wave data consumed by every other module.
///
/// phi_minus(xi) = f'(U(xi)) - f'(U_-) and phi_plus(xi) = f'(U(xi)) - f'(U_+)
/// are stored separately (rather than derived from f'(U)) so each stays
/// accurate deep in the tail where it is small.
struct ReactionModel {
  std::string name;
  double fprime_minus = 0.0;
  double fprime_plus = 0.0;
  double speed = 0.0;
  double decay_scale = 1.0;
  TailShape tail = TailShape::exponential;
  double tail_amplitude = 0.0;
  double support_lo = 0.0;
  double support_hi = 0.0;
  std::function<double(double)> phi_minus;
  std::function<double(double)> phi_plus;
  /// d/dxi f'(U(xi)); identical for phi_minus and phi_plus.
  std::function<double(double)> phi_slope;

  double fprime_along_wave(double xi) const { return phi_minus(xi) + fprime_minus; }

  double phi(Side side, double xi) const { return side == Side::minus ? phi_minus(xi) : phi_plus(xi); }

  /// Smallest |xi| beyond which phi_minus (for xi < 0) and phi_plus
  /// (for xi > 0) stay below tol.
  double tail_radius(double tol) const {
    switch (tail) {
      case TailShape::compact:
        return std::max(std::abs(support_lo), std::abs(support_hi));
      case TailShape::gaussian:
        return tail_amplitude <= tol ? 0.0 : std::sqrt(std::log(tail_amplitude / tol) / decay_scale);
      case TailShape::exponential:
        break;
    }
    return tail_amplitude <= tol ? 0.0 : std::log(tail_amplitude / tol) / decay_scale;
  }

  double left_cutoff(double tol) const { return tail == TailShape::compact ? support_lo : -tail_radius(tol); }
  double right_cutoff(double tol) const { return tail == TailShape::compact ? support_hi : tail_radius(tol); }

  /// Half-length at which |phi_-(-L)| and |phi_+(L)| drop below 1e-12.
  double recommended_L() const { return tail_radius(1e-12); }
};

/// Bistable Nagumo front, f(u) = u(1-u)(u-a), with the explicit profile
/// U(xi) = 1/(1 + exp(-xi/sqrt 2)) joining U_- = 0 to U_+ = 1.
inline ReactionModel make_nagumo(double a) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("nagumo: parameter a must lie in (0, 1)");
  const double r = 1.0 / std::sqrt(2.0);
  ReactionModel m;
  m.name = "nagumo";
  m.fprime_minus = -a;
  m.fprime_plus = a - 1.0;
  // Substituting U into U'' + c U' + f(U) = 0 leaves U(1-U)(1/2 + c/sqrt2 - a).
  m.speed = (2.0 * a - 1.0) * r;
  m.decay_scale = r;
  m.tail = TailShape::exponential;
  m.tail_amplitude = std::max(2.0 * (1.0 + a), 4.0 - 2.0 * a);
  // u = U(xi), w = 1 - U(xi), each formed without cancellation.
  auto u_of = [r](double xi) { return 1.0 / (1.0 + std::exp(-r * xi)); };
  auto w_of = [r](double xi) { return 1.0 / (1.0 + std::exp(r * xi)); };
  // f'(u) = -3u^2 + 2(1+a)u - a.
  m.phi_minus = [a, u_of](double xi) {
    const double u = u_of(xi);
    return u * (2.0 * (1.0 + a) - 3.0 * u);
  };
  m.phi_plus = [a, w_of](double xi) {
    const double w = w_of(xi);
    return w * ((4.0 - 2.0 * a) - 3.0 * w);
  };
  m.phi_slope = [a, r, u_of, w_of](double xi) {
    const double u = u_of(xi), w = w_of(xi);
    return (2.0 * (1.0 + a) - 6.0 * u) * r * u * w;
  };
  return m;
}

/// f'(U) identically q: phi_- = phi_+ = 0.
inline ReactionModel make_constant(double q, double c) {
  ReactionModel m;
  m.name = "constant";
  m.fprime_minus = q;
  m.fprime_plus = q;
  m.speed = c;
  m.decay_scale = 1.0;
  m.tail = TailShape::exponential;
  m.tail_amplitude = 0.0;
  m.phi_minus = [](double) { return 0.0; };
  m.phi_plus = [](double) { return 0.0; };
  m.phi_slope = [](double) { return 0.0; };
  return m;
}

/// Synthetic potential phi_- = phi_+ = amplitude * exp(-(xi/width)^2) on top
/// of a constant f'(U_+-) = q.
inline ReactionModel make_bump(double q, double c, double amplitude, double width) {
  if (!(width > 0.0)) throw DomainError("bump: width must be positive");
  ReactionModel m;
  m.name = "bump";
  m.fprime_minus = q;
  m.fprime_plus = q;
  m.speed = c;
  m.decay_scale = 1.0 / (width * width);
  m.tail = TailShape::gaussian;
  m.tail_amplitude = std::abs(amplitude);
  auto bump = [amplitude, width](double xi) {
    const double s = xi / width;
    return amplitude * std::exp(-s * s);
  };
  m.phi_minus = bump;
  m.phi_plus = bump;
  m.phi_slope = [bump, width](double xi) { return -2.0 * xi / (width * width) * bump(xi); };
  return m;
}

/// Samples of f'(U(xi)) with a monotonicity-preserving cubic Hermite
/// interpolant. Derivatives at the nodes come from the local 5-point
/// Lagrange polynomial and are then limited (Hyman filter) wherever the
/// data are locally monotone, so the tails cannot overshoot.
class TabulatedProfile {
 public:
  TabulatedProfile(std::vector<double> nodes, std::vector<double> values)
      : x_(std::move(nodes)), y_(std::move(values)) {
    if (x_.size() != y_.size()) throw DomainError("profile: node and value counts differ");
    if (x_.size() < 4) throw DomainError("profile: at least 4 samples are required");
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1])) throw DomainError("profile: nodes must be strictly increasing");
    compute_slopes();
  }

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

  double operator()(double xi) const {
    const auto [i, t] = locate(xi);
    const double h = x_[i + 1] - x_[i];
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i] + (-2 * t3 + 3 * t2) * y_[i + 1] +
           (t3 - t2) * h * d_[i + 1];
  }

  double derivative(double xi) const {
    const auto [i, t] = locate(xi);
    const double h = x_[i + 1] - x_[i];
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y_[i] + (-6 * t2 + 6 * t) * y_[i + 1]) / h + (3 * t2 - 4 * t + 1) * d_[i] +
           (3 * t2 - 2 * t) * d_[i + 1];
  }

 private:
  std::pair<std::size_t, double> locate(double xi) const {
    if (!(xi >= x_.front() && xi <= x_.back())) throw DomainError("profile: evaluation outside the sampled range");
    auto it = std::upper_bound(x_.begin(), x_.end(), xi);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    return {i, (xi - x_[i]) / (x_[i + 1] - x_[i])};
  }

  void compute_slopes() {
    const std::size_t n = x_.size();
    d_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t width = std::min<std::size_t>(5, n);
      const std::size_t lo = std::min(i < 2 ? 0 : i - 2, n - width);
      d_[i] = lagrange_slope(i, lo, lo + width);
    }
    std::vector<double> secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    auto limit = [](double d, double s) {
      if (s == 0.0 || d * s <= 0.0) return 0.0;
      return std::copysign(std::min(std::abs(d), 3.0 * std::abs(s)), s);
    };
    d_[0] = limit(d_[0], secant[0]);
    d_[n - 1] = limit(d_[n - 1], secant[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double sl = secant[i - 1], sr = secant[i];
      if (sl * sr > 0.0) {
        const double bound = std::abs(sl) < std::abs(sr) ? sl : sr;
        d_[i] = limit(d_[i], bound);
      } else if (sl == 0.0 || sr == 0.0) {
        d_[i] = 0.0;
      }
      // Strict local extremum of the data: nothing to preserve, keep the estimate.
    }
  }

  double lagrange_slope(std::size_t i, std::size_t lo, std::size_t hi) const {
    double slope = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      double w;
      if (j == i) {
        w = 0.0;
        for (std::size_t m = lo; m < hi; ++m)
          if (m != i) w += 1.0 / (x_[i] - x_[m]);
      } else {
        double num = 1.0, den = 1.0;
        for (std::size_t m = lo; m < hi; ++m) {
          if (m == j) continue;
          den *= x_[j] - x_[m];
          if (m != i) num *= x_[i] - x_[m];
        }
        w = num / den;
      }
      slope += w * y_[j];
    }
    return slope;
  }

  std::vector<double> x_, y_, d_;
};

/// Reads "xi value" records (whitespace or comma separated, '#' comments).
inline TabulatedProfile ingest_profile(std::istream& in) {
  std::vector<double> xs, ys;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError(lineno, "expected two fields, found " + std::to_string(tok.size()));
    double vals[2];
    for (int k = 0; k < 2; ++k) {
      char* end = nullptr;
      vals[k] = std::strtod(tok[k].c_str(), &end);
      if (end == tok[k].c_str() || *end != '\0' || !std::isfinite(vals[k]))
        throw ParseError(lineno, "not a finite number: '" + tok[k] + "'");
    }
    if (!xs.empty() && !(vals[0] > xs.back())) throw ParseError(lineno, "xi values must be strictly increasing");
    xs.push_back(vals[0]);
    ys.push_back(vals[1]);
  }
  if (xs.size() < 4) throw DomainError("profile: at least 4 samples are required, got " + std::to_string(xs.size()));
  return TabulatedProfile(std::move(xs), std::move(ys));
}

/// Model backed by a sampled profile. Outside the sampled range f'(U) is
/// held at the first/last sample, which are taken as f'(U_-), f'(U_+).
inline ReactionModel make_tabulated(TabulatedProfile profile, double c) {
  ReactionModel m;
  m.name = "profile";
  m.fprime_minus = profile.values().front();
  m.fprime_plus = profile.values().back();
  m.speed = c;
  m.decay_scale = 1.0;  // unused: the tails are compact
  m.tail = TailShape::compact;
  m.support_lo = profile.front();
  m.support_hi = profile.back();
  double amp = 0.0;
  for (double v : profile.values())
    amp = std::max({amp, std::abs(v - m.fprime_minus), std::abs(v - m.fprime_plus)});
  m.tail_amplitude = amp;
  auto p = std::make_shared<const TabulatedProfile>(std::move(profile));
  auto fprime = [p](double xi) {
    if (xi <= p->front()) return p->values().front();
    if (xi >= p->back()) return p->values().back();
    return (*p)(xi);
  };
  const double fm = m.fprime_minus, fp = m.fprime_plus;
  m.phi_minus = [fprime, fm](double xi) { return fprime(xi) - fm; };
  m.phi_plus = [fprime, fp](double xi) { return fprime(xi) - fp; };
  m.phi_slope = [p](double xi) {
    if (xi <= p->front() || xi >= p->back()) return 0.0;
    return p->derivative(xi);
  };
  return m;
}

// Potentials --------------------------------------------------------------

enum class PotentialKind { Phi_minus_at, Phi_plus_at, Phi_total, phi_prime_sq_total };

inline constexpr double kQuadTolerance = 1e-12;
inline constexpr double kTailTolerance = 1e-15;

/// Phi_-(xi) = integral of phi_- over (-inf, xi].
inline double Phi_minus(const ReactionModel& m, double xi) {
  const double lo = m.left_cutoff(kTailTolerance);
  if (xi <= lo) return 0.0;
  return quad::integrate(m.phi_minus, lo, xi, kQuadTolerance);
}

/// Phi_+(xi) = integral of phi_+ over [xi, inf).
inline double Phi_plus(const ReactionModel& m, double xi) {
  const double hi = m.right_cutoff(kTailTolerance);
  if (xi >= hi) return 0.0;
  return quad::integrate(m.phi_plus, xi, hi, kQuadTolerance);
}

inline double quad_potential(const ReactionModel& m, PotentialKind kind, double xi = 0.0) {
  switch (kind) {
    case PotentialKind::Phi_minus_at:
      return Phi_minus(m, xi);
    case PotentialKind::Phi_plus_at:
      return Phi_plus(m, xi);
    case PotentialKind::Phi_total:
      return Phi_minus(m, 0.0) + Phi_plus(m, 0.0);
    case PotentialKind::phi_prime_sq_total: {
      const double lo = m.left_cutoff(kTailTolerance), hi = m.right_cutoff(kTailTolerance);
      if (!(hi > lo)) return 0.0;
      auto sq = [&m](double x) {
        const double s = m.phi_slope(x);
        return s * s;
      };
      return quad::integrate(sq, lo, hi, kQuadTolerance);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

/// Potential maps bundled with the total Phi = Phi_-(0) + Phi_+(0).
struct PotentialData {
  std::function<double(double)> phi_minus;
  std::function<double(double)> phi_plus;
  std::function<double(double)> Phi_minus_at;
  std::function<double(double)> Phi_plus_at;
  double Phi_total = 0.0;
};

inline PotentialData potential_data(const ReactionModel& m) {
  PotentialData p;
  p.phi_minus = m.phi_minus;
  p.phi_plus = m.phi_plus;
  p.Phi_minus_at = [m](double xi) { return Phi_minus(m, xi); };
  p.Phi_plus_at = [m](double xi) { return Phi_plus(m, xi); };
  p.Phi_total = quad_potential(m, PotentialKind::Phi_total);
  return p;
}

}  // namespace evans
