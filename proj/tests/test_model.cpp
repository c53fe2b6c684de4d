#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "evans/model.hpp"

using namespace evans;

namespace {

const double kPi = std::acos(-1.0);
const double kR = 1.0 / std::sqrt(2.0);

double U(double xi) { return 1.0 / (1.0 + std::exp(-kR * xi)); }
double fprime(double a, double u) { return -3.0 * u * u + 2.0 * (1.0 + a) * u - a; }

std::string nagumo_table(double a, double lo, double hi, double step) {
  std::ostringstream os;
  os.precision(17);
  os << "# xi  f'(U)\n";
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * step;
    os << x << ", " << fprime(a, U(x)) << "\n";
  }
  return os.str();
}

}  // namespace

TEST(Nagumo, ProfileSolvesTravellingWaveOde) {
  // U' = r U(1-U), U'' = r^2 U(1-U)(1-2U) for the logistic profile.
  for (double a : {0.1, 0.3, 0.5, 0.8}) {
    const ReactionModel m = make_nagumo(a);
    for (double xi = -20.0; xi <= 20.0; xi += 0.37) {
      const double u = U(xi), up = kR * u * (1 - u), upp = kR * kR * u * (1 - u) * (1 - 2 * u);
      const double f = u * (1 - u) * (u - a);
      EXPECT_NEAR(upp + m.speed * up + f, 0.0, 1e-14) << a << " " << xi;
    }
  }
}

TEST(Nagumo, ProfileDerivativeByFiniteDifferences) {
  const double d = 1e-4;
  for (double xi = -10.0; xi <= 10.0; xi += 0.5) {
    const double fd = (U(xi + d) - U(xi - d)) / (2 * d);
    EXPECT_NEAR(fd, kR * U(xi) * (1 - U(xi)), 1e-9);
  }
}

TEST(Nagumo, SpeedAndEndStates) {
  EXPECT_EQ(make_nagumo(0.5).speed, 0.0);
  const ReactionModel m = make_nagumo(0.3);
  EXPECT_NEAR(m.speed, -0.4 / std::sqrt(2.0), 1e-16);
  EXPECT_DOUBLE_EQ(m.fprime_minus, -0.3);
  EXPECT_DOUBLE_EQ(m.fprime_plus, -0.7);
  EXPECT_THROW(make_nagumo(0.0), DomainError);
  EXPECT_THROW(make_nagumo(1.0), DomainError);
}

TEST(Nagumo, PotentialsMatchDirectFormula) {
  const double a = 0.3;
  const ReactionModel m = make_nagumo(a);
  for (double xi = -15.0; xi <= 15.0; xi += 0.5) {
    const double fp = fprime(a, U(xi));
    EXPECT_NEAR(m.phi_minus(xi), fp - m.fprime_minus, 1e-14);
    EXPECT_NEAR(m.phi_plus(xi), fp - m.fprime_plus, 1e-14);
    EXPECT_NEAR(m.fprime_along_wave(xi), fp, 1e-14);
  }
  // Deep tails keep relative accuracy.
  EXPECT_NEAR(m.phi_minus(-60.0) / (2.0 * (1 + a) * std::exp(-60.0 * kR)), 1.0, 1e-12);
  EXPECT_NEAR(m.phi_plus(60.0) / ((4.0 - 2.0 * a) * std::exp(-60.0 * kR)), 1.0, 1e-12);
}

TEST(Nagumo, SlopeByFiniteDifferences) {
  const ReactionModel m = make_nagumo(0.3);
  const double d = 1e-4;
  for (double xi = -10.0; xi <= 10.0; xi += 0.25) {
    const double fd = (m.phi_minus(xi + d) - m.phi_minus(xi - d)) / (2 * d);
    EXPECT_NEAR(m.phi_slope(xi), fd, 1e-8);
  }
}

TEST(Nagumo, IntegratedPotentials) {
  // Substituting u = U(xi): Phi_-(0) = sqrt2 (3/2 + (2a-1) ln 2),
  // Phi_+(0) = sqrt2 (3/2 + (1-2a) ln 2).
  for (double a : {0.2, 0.3, 0.6}) {
    const ReactionModel m = make_nagumo(a);
    const double s2 = std::sqrt(2.0);
    EXPECT_NEAR(Phi_minus(m, 0.0), s2 * (1.5 + (2 * a - 1) * std::log(2.0)), 1e-11);
    EXPECT_NEAR(Phi_plus(m, 0.0), s2 * (1.5 + (1 - 2 * a) * std::log(2.0)), 1e-11);
    EXPECT_NEAR(quad_potential(m, PotentialKind::Phi_total), 3.0 * s2, 1e-11);
  }
}

TEST(Nagumo, RecommendedHalfLength) {
  const ReactionModel m = make_nagumo(0.3);
  const double L = m.recommended_L();
  EXPECT_GT(L, 35.0);
  EXPECT_LT(L, 45.0);
  EXPECT_LE(std::abs(m.phi_minus(-L)), 1e-12);
  EXPECT_LE(std::abs(m.phi_plus(L)), 1e-12);
}

TEST(Bump, Integrals) {
  const ReactionModel m = make_bump(0.0, 0.0, 1.0, 1.0);
  EXPECT_NEAR(Phi_minus(m, 0.0), std::sqrt(kPi) / 2, 1e-12);
  EXPECT_NEAR(Phi_plus(m, 0.0), std::sqrt(kPi) / 2, 1e-12);
  EXPECT_NEAR(quad_potential(m, PotentialKind::Phi_total), std::sqrt(kPi), 1e-12);
  EXPECT_NEAR(quad_potential(m, PotentialKind::phi_prime_sq_total), std::sqrt(kPi / 2), 1e-12);
  // Phi_-(x) + Phi_+(x) is the total for every x.
  for (double x : {-1.3, 0.2, 2.0})
    EXPECT_NEAR(Phi_minus(m, x) + Phi_plus(m, x), std::sqrt(kPi), 1e-12);
  EXPECT_NEAR(Phi_minus(m, 1.0), std::sqrt(kPi) / 2 * (1 + std::erf(1.0)), 1e-12);

  // amplitude A, width w: Phi = A w sqrt(pi), integral of phi'^2 = A^2 sqrt(pi/2) / w.
  const ReactionModel w = make_bump(1.0, 0.5, -0.4, 2.5);
  EXPECT_NEAR(quad_potential(w, PotentialKind::Phi_total), -0.4 * 2.5 * std::sqrt(kPi), 1e-12);
  EXPECT_NEAR(quad_potential(w, PotentialKind::phi_prime_sq_total), 0.16 * std::sqrt(kPi / 2) / 2.5, 1e-12);
  EXPECT_THROW(make_bump(0.0, 0.0, 1.0, 0.0), DomainError);
}

TEST(Constant, HasNoPotential) {
  const ReactionModel m = make_constant(2.0, -1.0);
  EXPECT_EQ(m.phi_minus(3.0), 0.0);
  EXPECT_EQ(m.phi_plus(-3.0), 0.0);
  EXPECT_EQ(m.recommended_L(), 0.0);
  EXPECT_EQ(quad_potential(m, PotentialKind::Phi_total), 0.0);
  const PotentialData p = potential_data(m);
  EXPECT_EQ(p.Phi_total, 0.0);
  EXPECT_EQ(p.Phi_minus_at(1.0), 0.0);
}

TEST(Tabulated, ReproducesNagumo) {
  const double a = 0.3;
  std::istringstream in(nagumo_table(a, -40.0, 40.0, 0.05));
  const ReactionModel m = make_tabulated(ingest_profile(in), make_nagumo(a).speed);
  EXPECT_NEAR(m.fprime_minus, -a, 1e-10);
  EXPECT_NEAR(m.fprime_plus, a - 1, 1e-10);
  double worst = 0.0;
  for (double xi = -39.97; xi < 40.0; xi += 0.0731) worst = std::max(worst, std::abs(m.fprime_along_wave(xi) - fprime(a, U(xi))));
  EXPECT_LT(worst, 1e-6);
  EXPECT_NEAR(quad_potential(m, PotentialKind::Phi_total), 3.0 * std::sqrt(2.0), 1e-5);
  EXPECT_EQ(m.phi_minus(-100.0), 0.0);
  EXPECT_EQ(m.phi_plus(100.0), 0.0);
}

TEST(Tabulated, NoOvershootOnMonotoneData) {
  // Step-like data: a monotone interpolant stays inside [0, 1].
  TabulatedProfile p({0, 1, 2, 3, 4, 5, 6}, {0, 0, 0, 1, 1, 1, 1});
  for (double x = 0.0; x <= 6.0; x += 0.01) {
    EXPECT_GE(p(x), -1e-15);
    EXPECT_LE(p(x), 1.0 + 1e-15);
  }
  EXPECT_THROW(p(6.5), DomainError);
}

TEST(Tabulated, IngestErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      ingest_profile(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("0 1\n1 2\n# note\n2 x\n3 4\n"), 4u);
  EXPECT_EQ(line_of("0 1\n1 2 3\n"), 2u);
  EXPECT_EQ(line_of("0 1\n1 2\n1 3\n4 5\n"), 3u);
  EXPECT_EQ(line_of("0 1\n1 2\n2 nan\n"), 3u);

  std::istringstream few("0 1\n1 2\n2 3\n");
  EXPECT_THROW(ingest_profile(few), DomainError);
  std::istringstream ok("0,1\n1, 2\n\n2 3 # trailing\n3 4\n");
  EXPECT_EQ(ingest_profile(ok).nodes().size(), 4u);
}
