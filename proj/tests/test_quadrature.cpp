#include <gtest/gtest.h>

#include <cmath>

#include "evans/quadrature.hpp"

using namespace evans;

TEST(Quadrature, Polynomials) {
  EXPECT_NEAR(quad::integrate([](double x) { return x * x * x; }, 0.0, 2.0), 4.0, 1e-13);
  EXPECT_NEAR(quad::integrate([](double x) { return 3.0 * x * x; }, -1.0, 1.0), 2.0, 1e-13);
  EXPECT_EQ(quad::integrate([](double) { return 1.0; }, 2.0, 2.0), 0.0);
}

TEST(Quadrature, ReversedLimits) {
  const double a = quad::integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
  EXPECT_NEAR(a, std::exp(1.0) - 1.0, 1e-12);
  EXPECT_NEAR(quad::integrate([](double x) { return std::exp(x); }, 1.0, 0.0), -a, 1e-15);
}

TEST(Quadrature, Gaussian) {
  const double pi = std::acos(-1.0);
  EXPECT_NEAR(quad::integrate([](double x) { return std::exp(-x * x); }, -9.0, 9.0), std::sqrt(pi), 1e-11);
}

TEST(Quadrature, NarrowFeatureIsFound) {
  // Width-0.01 spike inside a long interval; panels no wider than 1 keep the
  // first samples from stepping over it.
  const double pi = std::acos(-1.0);
  auto f = [](double x) { return std::exp(-1e4 * (x - 3.3) * (x - 3.3)); };
  EXPECT_NEAR(quad::integrate(f, 0.0, 10.0), std::sqrt(pi) / 100.0, 1e-11);
}

TEST(Quadrature, DepthCapThrows) {
  auto jump = [](double x) { return x < 1.0 / 3.0 ? 0.0 : 1.0; };
  EXPECT_THROW(quad::adaptive_simpson(jump, 0.0, 1.0, 1e-300), NumericalError);
}

TEST(GaussRule, WeightsAndExactness) {
  for (int n : {1, 2, 5, 16}) {
    const auto r = quad::gauss_legendre_rule(n);
    double w = 0.0;
    for (double x : r.weights) w += x;
    EXPECT_NEAR(w, 2.0, 1e-14) << n;
  }
  const auto two = quad::gauss_legendre_rule(2);
  EXPECT_NEAR(two.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
  // 16 points integrate degree 31 exactly.
  EXPECT_NEAR(quad::gauss16([](double x) { return std::pow(x, 30) + std::pow(x, 31); }, -1.0, 1.0), 2.0 / 31.0,
              1e-14);
  EXPECT_NEAR(quad::gauss16([](double x) { return std::sin(x); }, 0.0, 0.4), 1.0 - std::cos(0.4), 1e-16);
}
