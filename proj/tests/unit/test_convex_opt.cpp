#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "robustq/convex_opt.hpp"
#include "robustq/renewal.hpp"

using namespace robustq;

namespace {

ScalarObjective make(std::function<double(double)> f, Interval d, Convexity c = Convexity::convex) {
  ScalarObjective o;
  o.eval = std::move(f);
  o.domain = d;
  o.convexity = c;
  return o;
}

// log(0.2 e^{l1} + 0.5 e^{-l2} + 0.3 e^{l1 + l2}); zero at the origin, gradient (0.5, -0.2) there.
// Evaluated in log-sum-exp form so that large arguments do not overflow into a fake domain edge.
double log_partition(double l1, double l2) {
  const double t[3] = {std::log(0.2) + l1, std::log(0.5) - l2, std::log(0.3) + l1 + l2};
  const double m = std::max({t[0], t[1], t[2]});
  return m + std::log(std::exp(t[0] - m) + std::exp(t[1] - m) + std::exp(t[2] - m));
}

}  // namespace

TEST(Minimize1d, ShiftedParabolaOnHalfLine) {
  const auto r = minimize_1d(make([](double x) { return (x - 3) * (x - 3); }, {0.0, kInf}));
  EXPECT_NEAR(r.arg, 3.0, 1e-6);
  EXPECT_NEAR(r.value, 0.0, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.boundary, BoundaryHit::none);
  EXPECT_LT(r.bracket_lo, r.arg);
  EXPECT_GT(r.bracket_hi, r.arg);
}

TEST(Minimize1d, AlphaObjectiveMatchesGridScan) {
  auto f = [](double a) { return -(a - 1) / a + (a - 1) * 0.1; };
  const auto r = minimize_1d(make(f, {1.0, kInf}));
  double best = kInf;
  for (int i = 1; i <= 1000000; ++i) best = std::min(best, f(1.0 + 10.0 * i / 1000000.0));
  EXPECT_NEAR(r.value, best, 1e-5);
  EXPECT_NEAR(r.arg, 1.0 / std::sqrt(0.1), 1e-3);
}

TEST(Minimize1d, MonotoneObjectiveFlagsTheBoundary) {
  const auto down = minimize_1d(make([](double x) { return std::exp(-x); }, {0.0, kInf}));
  EXPECT_EQ(down.boundary, BoundaryHit::upper);
  EXPECT_FALSE(down.converged);
  EXPECT_LT(down.value, 1e-6);
  const auto up = minimize_1d(make([](double x) { return x; }, {2.0, 5.0}));
  EXPECT_EQ(up.boundary, BoundaryHit::lower);
  EXPECT_NEAR(up.value, 2.0, 1e-6);
}

TEST(Minimize1d, BoundedIntervalAndErrors) {
  const auto r = minimize_1d(make([](double x) { return std::cosh(x - 0.3); }, {-1.0, 1.0}));
  EXPECT_NEAR(r.arg, 0.3, 1e-6);
  EXPECT_THROW(minimize_1d(make([](double) { return kInf; }, {0.0, 1.0})), std::domain_error);
  EXPECT_THROW(minimize_1d(make([](double x) { return x; }, {1.0, 1.0})), std::invalid_argument);
}

TEST(Maximize1d, Examples) {
  const auto r = maximize_1d(make([](double x) { return -x * x; }, {-kInf, kInf}, Convexity::concave));
  EXPECT_NEAR(r.arg, 0.0, 1e-6);
  EXPECT_NEAR(r.value, 0.0, 1e-12);
  EXPECT_THROW(maximize_1d(make([](double) { return -kInf; }, {0.0, 1.0})), std::domain_error);
}

TEST(Minimize1d, ConvexFixturesAgreeWithDenseGrid) {
  const std::vector<std::pair<std::function<double(double)>, Interval>> fixtures{
      {[](double x) { return x + 1.0 / x; }, {0.0, kInf}},
      {[](double x) { return std::exp(x) - 2 * x; }, {-kInf, kInf}},
      {[](double x) { return -std::log(x) - std::log(1 - x) + 3 * x; }, {0.0, 1.0}},
      {[](double x) { return std::abs(x - 0.7) + 0.1 * x * x; }, {-5.0, 5.0}},
  };
  for (const auto& [f, d] : fixtures) {
    const double tol = 1e-8;
    const auto r = minimize_1d(make(f, d), tol);
    const double lo = std::isfinite(d.lo) ? d.lo : -10.0;
    const double hi = std::isfinite(d.hi) ? d.hi : 10.0;
    double best = kInf;
    for (int i = 1; i < 1000000; ++i) best = std::min(best, f(lo + (hi - lo) * i / 1000000.0));
    EXPECT_LE(r.value, best + 10 * tol);
  }
}

TEST(Minimize1d, Deterministic) {
  auto f = [](double x) { return std::pow(x - 1.234, 4) + std::sin(x) * 1e-3; };
  const auto a = minimize_1d(make(f, {-kInf, kInf}));
  const auto b = minimize_1d(make(f, {-kInf, kInf}));
  EXPECT_EQ(a.arg, b.arg);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SearchCoordinate, RoundTrips) {
  for (Interval d : {Interval{}, Interval{1.0, kInf}, Interval{-kInf, 2.0}, Interval{-1.0, 3.0}}) {
    for (double x : {-0.5, 0.0, 1.5, 1.9}) {
      if (!(x > d.lo && x < d.hi)) continue;
      EXPECT_NEAR(from_search_coordinate(d, to_search_coordinate(d, x)), x, 1e-12);
    }
  }
}

TEST(Conjugate, QuadraticIsSelfConjugate) {
  auto f = [](double a, double b) { return 0.5 * (a * a + b * b); };
  for (auto x : {std::array{0.0, 0.0}, std::array{1.0, -2.0}, std::array{0.3, 0.7}}) {
    const auto r = fenchel_conjugate_2d(f, x);
    EXPECT_NEAR(r.value, 0.5 * (x[0] * x[0] + x[1] * x[1]), 1e-9);
    EXPECT_LE(r.fenchel_young_excess, 1e-9);
  }
}

TEST(Conjugate, VanishesAtTheGradientAndIsUnboundedOutsideTheHull) {
  const auto at_grad = fenchel_conjugate_2d(log_partition, {0.5, -0.2});
  EXPECT_NEAR(at_grad.value, 0.0, 1e-8);
  // (2, 0) lies outside the convex hull of {(1,0), (0,-1), (1,1)}.
  EXPECT_EQ(fenchel_conjugate_2d(log_partition, {2.0, 0.0}).value, kInf);
}

TEST(Conjugate, ConvexAlongRandomLines) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    // Random interior points of the hull: convex weights on the three vertices.
    auto point = [&] {
      double w0 = u(gen) + 0.05, w1 = u(gen) + 0.05, w2 = u(gen) + 0.05;
      const double s = w0 + w1 + w2;
      w0 /= s, w1 /= s, w2 /= s;
      return std::array{w0 * 1.0 + w1 * 0.0 + w2 * 1.0, w0 * 0.0 - w1 + w2};
    };
    const auto x = point(), y = point();
    const std::array<double, 2> m{0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1])};
    const double fx = fenchel_conjugate_2d(log_partition, x).value;
    const double fy = fenchel_conjugate_2d(log_partition, y).value;
    const double fm = fenchel_conjugate_2d(log_partition, m).value;
    EXPECT_LE(fm, 0.5 * (fx + fy) + 1e-8);
  }
}

TEST(Conjugate, ExponentialTiltIdentity) {
  for (double rho : {2.0, 3.0}) {
    const ExponentialTilt tilt(RenewalSpec::exponential(rho));
    for (double x1 : {0.5, 1.0, 2.0}) {
      const double v = legendre_transform(tilt, {x1, std::log(rho) - (rho - 1) * x1});
      EXPECT_NEAR(v, x1 - 1 - std::log(x1), 1e-5) << "rho=" << rho << " x1=" << x1;
    }
  }
}
