#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "evans/integrators.hpp"
#include "evans/spectral.hpp"

using namespace evans;

namespace {

// Classical RK4 on Y' = G(xi) Y, the oracle for the layer expansion.
C2Vector rk4(const std::function<C2Matrix(double)>& G, C2Vector y, double a, double b, int n) {
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) {
    const double x = a + i * h;
    const C2Vector k1 = G(x) * y;
    const C2Vector k2 = G(x + h / 2) * (y + (h / 2) * k1);
    const C2Vector k3 = G(x + h / 2) * (y + (h / 2) * k2);
    const C2Vector k4 = G(x + h) * (y + h * k3);
    y = y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

}  // namespace

TEST(Frame, Examples) {
  const SpectralFrame f = build_frame(make_constant(0.0, 0.0), 4.0);
  EXPECT_EQ(f.kappa_minus, cplx(4.0));
  EXPECT_EQ(f.mu1(Side::minus), cplx(2.0));
  EXPECT_EQ(f.mu2(Side::plus), cplx(-2.0));
  EXPECT_TRUE(f.admissible);

  const SpectralFrame n = build_frame(make_nagumo(0.3), 0.0);
  EXPECT_NEAR(std::abs(n.kappa_minus - std::sqrt(1.28)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(n.kappa_plus - std::sqrt(0.08 + 2.8)), 0.0, 1e-15);

  const SpectralFrame bad = build_frame(make_constant(1.0, 0.0), 0.5);
  EXPECT_FALSE(bad.admissible);
  EXPECT_THROW(require_admissible(bad), DomainError);
  EXPECT_THROW(transformed_generator(make_constant(1.0, 0.0), bad, Side::minus, 0.0), DomainError);
}

TEST(Frame, PrincipalBranch) {
  EXPECT_EQ(principal_sqrt(-4.0), cplx(0.0, 2.0));
  EXPECT_EQ(principal_sqrt(cplx(-4.0, -0.0)), cplx(0.0, 2.0));
  EXPECT_GT(principal_sqrt(cplx(-4.0, -1e-3)).real(), 0.0);
}

TEST(Frame, RootsAndBasisInvariants) {
  const ReactionModel m = make_nagumo(0.3);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-5.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const cplx l(d(rng), d(rng));
    const SpectralFrame f = build_frame(m, l);
    for (Side s : {Side::minus, Side::plus}) {
      const double fp = s == Side::minus ? m.fprime_minus : m.fprime_plus;
      for (cplx mu : {f.mu1(s), f.mu2(s)}) EXPECT_LT(std::abs(mu * mu + m.speed * mu - (l - fp)), 1e-11 * (1 + std::abs(l)));
      EXPECT_NEAR(std::abs(f.mu1(s) + f.mu2(s) + m.speed), 0.0, 1e-13);
      EXPECT_NEAR(std::abs(f.B(s).det() + f.kappa(s)), 0.0, 1e-12);
      EXPECT_GE(f.kappa(s).real(), 0.0);
    }
  }
}

TEST(Frame, ConjugateSymmetry) {
  const ReactionModel m = make_nagumo(0.3);
  const cplx l(2.0, 3.0);
  const SpectralFrame f = build_frame(m, l), g = build_frame(m, std::conj(l));
  EXPECT_EQ(g.kappa_minus, std::conj(f.kappa_minus));
  EXPECT_EQ(g.kappa_plus, std::conj(f.kappa_plus));
}

TEST(Generator, TransformedEqualsConjugatedRaw) {
  const ReactionModel m = make_nagumo(0.3);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-3.0, 30.0), x(-8.0, 8.0);
  for (int i = 0; i < 100; ++i) {
    const SpectralFrame f = build_frame(m, {d(rng), d(rng)});
    const double xi = x(rng);
    for (Side s : {Side::minus, Side::plus}) {
      const C2Matrix B = f.B(s);
      const C2Matrix expected =
          B.inverse() * raw_generator(m, f.lambda, xi) * B - f.boundary_exponent(s) * C2Matrix::identity();
      EXPECT_LT((transformed_generator(m, f, s, xi) - expected).max_abs(), 1e-12 * (1 + std::abs(f.lambda)));
    }
  }
}

TEST(BoundaryLayer, OrderZeroAndOne) {
  const ReactionModel m = make_bump(0.0, 0.3, 1.0, 1.0);
  const SpectralFrame f = build_frame(m, 100.0);
  EXPECT_EQ(boundary_layer_solution(m, f, Side::minus, -1.0, 0), (C2Vector{1.0, 0.0}));
  EXPECT_EQ(boundary_layer_solution(m, f, Side::plus, 1.0, 0), (C2Vector{0.0, 1.0}));
  const C2Vector y = boundary_layer_solution(m, f, Side::minus, 0.0, 1);
  EXPECT_NEAR(std::abs(y.u - (1.0 - std::sqrt(std::acos(-1.0)) / 2 / f.kappa_minus)), 0.0, 1e-12);
  EXPECT_THROW(boundary_layer_solution(m, f, Side::minus, 0.0, 3), DomainError);
}

TEST(BoundaryLayer, SecondOrderErrorFallsLikeKappaCubed) {
  // Decaying solution of the transformed system integrated from the far
  // tail where it equals its limit.
  const ReactionModel m = make_bump(0.0, 0.3, 1.0, 1.0);
  for (Side side : {Side::minus, Side::plus}) {
    std::vector<double> err, kap;
    for (double lambda : {100.0, 400.0, 1600.0}) {
      const SpectralFrame f = build_frame(m, lambda);
      auto G = [&](double xi) { return transformed_generator(m, f, side, xi); };
      const double far = side == Side::minus ? -8.0 : 8.0, xi = side == Side::minus ? 0.4 : -0.4;
      const C2Vector y0 = side == Side::minus ? C2Vector{1.0, 0.0} : C2Vector{0.0, 1.0};
      const C2Vector y = rk4(G, y0, far, xi, 20000);
      err.push_back((y - boundary_layer_solution(m, f, side, xi, 2)).max_abs());
      kap.push_back(std::abs(f.kappa(side)));
    }
    for (int i = 0; i < 2; ++i) {
      const double rate = std::log(err[i] / err[i + 1]) / std::log(kap[i + 1] / kap[i]);
      EXPECT_GT(rate, 2.7) << to_string(side);
    }
  }
}

TEST(StiffExpansion, MidpointMatchesExponentialToKappaCubed) {
  const ReactionModel m = make_bump(0.0, 0.0, 1.0, 1.0);
  const double h = 0.2, xi = -0.6;
  std::vector<double> scaled;
  for (double lambda : {1e4, 4e4, 1.6e5}) {
    const SpectralFrame f = build_frame(m, lambda);
    const C2Matrix exact = expm2(h * transformed_generator(m, f, Side::minus, xi + h / 2));
    const C2Matrix approx = onestep_stiff_expansion(m, f, Method::midpoint, xi, h);
    scaled.push_back((exact - approx).max_abs() * std::pow(std::abs(f.kappa_minus), 3));
  }
  for (double s : scaled) EXPECT_LT(s, 1.0);
  EXPECT_LT(scaled[2], 2 * scaled[0] + 1e-3);
}

TEST(StiffExpansion, Magnus4MatchesExponential) {
  const ReactionModel m = make_bump(0.0, 0.0, 1.0, 1.0);
  const double h = 0.2, xi = -0.6;
  double prev = 0.0;
  for (double lambda : {1e4, 4e4, 1.6e5}) {
    const SpectralFrame f = build_frame(m, lambda);
    auto G = [&](double x) { return transformed_generator(m, f, Side::minus, x); };
    const C2Matrix exact = expm2(magnus4_exponent(G, xi, h));
    const double e = (exact - onestep_stiff_expansion(m, f, Method::magnus4, xi, h)).max_abs();
    const double scaled = e * std::norm(f.kappa_minus);
    EXPECT_LT(scaled, 10.0);
    if (prev > 0.0) {
      EXPECT_LT(e, prev / 3.0);
    }
    prev = e;
  }
}

TEST(StiffExpansion, Guards) {
  const ReactionModel m = make_bump(0.0, 0.0, 1.0, 1.0);
  const SpectralFrame f = build_frame(m, 4.0);
  EXPECT_THROW(onestep_stiff_expansion(m, f, Method::midpoint, 0.0, 0.1), DomainError);
  const SpectralFrame g = build_frame(m, 1e4);
  EXPECT_THROW(onestep_stiff_expansion(m, g, Method::gauss_legendre4, 0.0, 0.1), DomainError);
  EXPECT_THROW(onestep_stiff_expansion(m, g, Method::midpoint, 0.0, -0.1), DomainError);
}
