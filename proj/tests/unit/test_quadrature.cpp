#include <gtest/gtest.h>

#include <cmath>

#include "robustq/convex_opt.hpp"
#include "robustq/quadrature.hpp"

using namespace robustq;

TEST(LogIntegral, KnownValues) {
  // int e^{-2y} = 1/2
  EXPECT_NEAR(log_integral_half_line([](double y) { return -2 * y; }), std::log(0.5), 1e-12);
  // int y e^{-y} = 1
  EXPECT_NEAR(log_integral_half_line([](double y) { return std::log(y) - y; }), 0.0, 1e-12);
  // int y^{-1/2} e^{-y} = sqrt(pi)
  EXPECT_NEAR(log_integral_half_line([](double y) { return -0.5 * std::log(y) - y; }), 0.5 * std::log(M_PI), 1e-9);
  // int e^{-y^2} = sqrt(pi)/2
  EXPECT_NEAR(log_integral_half_line([](double y) { return -y * y; }), std::log(std::sqrt(M_PI) / 2), 1e-12);
}

TEST(LogIntegral, LargeExponentsStayFinite) {
  // int e^{500 - y} = e^{500}
  EXPECT_NEAR(log_integral_half_line([](double y) { return 500.0 - y; }), 500.0, 1e-9);
}

TEST(LogIntegral, DivergenceIsReportedAsInfinity) {
  EXPECT_EQ(log_integral_half_line([](double) { return 0.0; }), kInf);
  EXPECT_EQ(log_integral_half_line([](double y) { return 0.1 * y; }), kInf);
  EXPECT_EQ(log_integral_half_line([](double y) { return -std::log(y) - y; }), kInf);
  EXPECT_EQ(log_integral_half_line([](double y) { return -1.5 * std::log(y) - y; }), kInf);
}

TEST(LogIntegral, CompactSupport) {
  // Indicator of [1, 2] times e^{-y}.
  auto phi = [](double y) { return (y >= 1.0 && y <= 2.0) ? -y : -kInf; };
  EXPECT_NEAR(log_integral_half_line(phi), std::log(std::exp(-1.0) - std::exp(-2.0)), 1e-6);
  EXPECT_EQ(log_integral_half_line([](double) { return -kInf; }), -kInf);
}
