#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "robustq/divergence.hpp"
#include "robustq/families.hpp"
#include "robustq/reneging.hpp"

using namespace robustq;

namespace {

FiniteDistribution random_distribution(std::mt19937_64& gen, std::size_t n, bool allow_zeros) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) {
    x = (allow_zeros && u(gen) < 0.15) ? 0.0 : u(gen) + 1e-3;
    s += x;
  }
  if (s == 0.0) {
    w[0] = 1.0;
    s = 1.0;
  }
  for (auto& x : w) x /= s;
  return FiniteDistribution(w);
}

// Direct evaluation of (1/(a(a-1))) log sum q^a p^(1-a), no log-sum-exp.
double renyi_oracle(const FiniteDistribution& q, const FiniteDistribution& p, double a) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (p[i] == 0.0) return kInf;
    s += std::pow(q[i], a) * std::pow(p[i], 1.0 - a);
  }
  return std::log(s) / (a * (a - 1.0));
}

}  // namespace

TEST(FiniteDistribution, RejectsBadWeights) {
  EXPECT_THROW(FiniteDistribution({}), std::invalid_argument);
  EXPECT_THROW(FiniteDistribution({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(FiniteDistribution({-0.1, 1.1}), std::invalid_argument);
  EXPECT_NO_THROW(FiniteDistribution({0.25, 0.75}));
}

TEST(RenyiOrder, RejectsOrdersAtOrBelowOne) {
  EXPECT_THROW(RenyiOrder::of(1.0), std::domain_error);
  EXPECT_THROW(RenyiOrder::of(0.5), std::domain_error);
  EXPECT_THROW(RenyiOrder::of(kInf), std::domain_error);
  EXPECT_TRUE(RenyiOrder::relative_entropy().is_limit());
}

TEST(RenyiDivergence, Examples) {
  const auto u2 = FiniteDistribution::uniform(2);
  EXPECT_EQ(renyi_divergence(u2, u2, RenyiOrder::of(2.0)), 0.0);
  EXPECT_NEAR(renyi_divergence(FiniteDistribution({1.0, 0.0}), u2, RenyiOrder::of(2.0)), 0.34657359027997264, 1e-12);
  EXPECT_EQ(renyi_divergence(u2, FiniteDistribution({1.0, 0.0}), RenyiOrder::of(2.0)), kInf);
  EXPECT_EQ(renyi_divergence(u2, FiniteDistribution({1.0, 0.0}), RenyiOrder::relative_entropy()), kInf);
}

TEST(RenyiDivergence, MatchesDirectSumOnRandomPairs) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const auto q = random_distribution(gen, n, true);
    const auto p = random_distribution(gen, n, true);
    for (double a : {1.5, 2.0, 4.0}) {
      const double got = renyi_divergence(q, p, RenyiOrder::of(a));
      const double want = renyi_oracle(q, p, a);
      if (std::isinf(want)) {
        EXPECT_EQ(got, kInf);
      } else {
        EXPECT_NEAR(got, want, 1e-10 * (1.0 + want));
        EXPECT_GE(got, -1e-15);
      }
    }
  }
}

TEST(RenyiDivergence, AdditiveOnProducts) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto q1 = random_distribution(gen, 3, false), p1 = random_distribution(gen, 3, false);
    const auto q2 = random_distribution(gen, 4, false), p2 = random_distribution(gen, 4, false);
    const auto q = FiniteDistribution::product(q1, q2), p = FiniteDistribution::product(p1, p2);
    for (double a : {1.5, 3.0}) {
      const auto o = RenyiOrder::of(a);
      EXPECT_NEAR(renyi_divergence(q, p, o), renyi_divergence(q1, p1, o) + renyi_divergence(q2, p2, o), 1e-10);
    }
    EXPECT_NEAR(relative_entropy(q, p), relative_entropy(q1, p1) + relative_entropy(q2, p2), 1e-10);
  }
}

TEST(RenyiDivergence, AlphaTimesDivergenceIsNondecreasing) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto q = random_distribution(gen, 5, false), p = random_distribution(gen, 5, false);
    double prev = 0.0;
    for (double a = 1.1; a <= 8.0 + 1e-9; a += 0.1) {
      const double v = a * renyi_divergence(q, p, RenyiOrder::of(a));
      EXPECT_GE(v, prev - 1e-12);
      prev = v;
    }
  }
}

TEST(RenyiDivergence, ContinuousAtOrderOne) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = random_distribution(gen, 4, false), p = random_distribution(gen, 4, false);
    const double kl = relative_entropy(q, p);
    EXPECT_NEAR(renyi_divergence(q, p, RenyiOrder::of(1.0 + 1e-6)), kl, 1e-4 * (1.0 + kl));
    EXPECT_DOUBLE_EQ(renyi_divergence(q, p, RenyiOrder::relative_entropy()), kl);
  }
}

// log E_P e^g = sup_Q [E_Q g - R(Q||P)], checked over a grid of Q.
TEST(RenyiDivergence, DonskerVaradhanOnThreePoints) {
  const FiniteDistribution p({0.2, 0.5, 0.3});
  const std::vector<double> g{1.0, -0.5, 2.0};
  double lhs = 0.0;
  for (std::size_t i = 0; i < 3; ++i) lhs += p[i] * std::exp(g[i]);
  lhs = std::log(lhs);
  double best = -kInf;
  const int m = 300;
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; i + j <= m; ++j) {
      const FiniteDistribution q({double(i) / m, double(j) / m, double(m - i - j) / m});
      const double v = q[0] * g[0] + q[1] * g[1] + q[2] * g[2] - relative_entropy(q, p);
      EXPECT_LE(v, lhs + 1e-12);
      best = std::max(best, v);
    }
  }
  EXPECT_NEAR(best, lhs, 1e-4);
}

TEST(PoissonRate, Examples) {
  for (double a : {1.5, 2.0, 7.0}) EXPECT_EQ(poisson_renyi_rate(1.0, a), 0.0);
  EXPECT_DOUBLE_EQ(poisson_renyi_rate(2.0, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(poisson_renyi_rate(0.0, 2.0), 0.5);
  EXPECT_NEAR(relative_entropy_rate(2.0), 0.38629436111989057, 1e-14);
  EXPECT_EQ(relative_entropy_rate(1.0), 0.0);
  EXPECT_EQ(relative_entropy_rate(0.0), 1.0);
  EXPECT_NEAR(poisson_renyi_rate(2.0, 1.001), relative_entropy_rate(2.0), 1e-3);
  EXPECT_NEAR(poisson_renyi_rate(0.5, 1.001), relative_entropy_rate(0.5), 1e-3);
  EXPECT_EQ(poisson_renyi_rate(2.0, RenyiOrder::relative_entropy()), relative_entropy_rate(2.0));
  EXPECT_THROW(poisson_renyi_rate(-1.0, 2.0), std::domain_error);
}

TEST(PoissonRate, ConvexInX) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 5.0), t(0.0, 1.0), al(1.05, 6.0);
  for (int i = 0; i < 2000; ++i) {
    const double x1 = u(gen), x2 = u(gen), s = t(gen), a = al(gen);
    const double mid = poisson_renyi_rate(s * x1 + (1 - s) * x2, a);
    EXPECT_LE(mid, s * poisson_renyi_rate(x1, a) + (1 - s) * poisson_renyi_rate(x2, a) + 1e-12);
  }
}

TEST(AlphaCurve, DomainHandling) {
  const AlphaCurve c([](double a) { return a - 1.0; }, 3.0, false);
  EXPECT_TRUE(c.contains(2.0));
  EXPECT_FALSE(c.contains(3.0));
  EXPECT_FALSE(c.contains(1.0));
  EXPECT_THROW(c(3.0), std::domain_error);
  const AlphaCurve closed([](double a) { return a; }, 3.0, true);
  EXPECT_TRUE(closed.contains(3.0));
  const AlphaCurve pt = AlphaCurve::single_point(2.0, 0.7);
  EXPECT_EQ(pt(2.0), 0.7);
  EXPECT_THROW(pt(2.5), std::domain_error);
  const std::vector<AlphaCurve> parts{c, AlphaCurve::constant(1.0)};
  const AlphaCurve s = AlphaCurve::sum(parts);
  EXPECT_DOUBLE_EQ(s(2.5), 2.5);
  EXPECT_FALSE(s.contains(3.0));
  EXPECT_DOUBLE_EQ(c.scaled(2.0)(2.0), 2.0);
}

TEST(Rrb, UpperAndLowerForms) {
  RrbInputs in;
  EXPECT_EQ(rrb_upper(in, 2.0), 0.0);
  in.ref_log_prob = -1.0;
  in.rdr_curve = AlphaCurve::constant(0.3);
  EXPECT_DOUBLE_EQ(rrb_upper(in, 2.0), -0.5 + 0.3);
  in.direction = BoundDirection::lower;
  EXPECT_DOUBLE_EQ(rrb_upper(in, 2.0), -2.0 - 0.6);
}

// Both Hoelder inequalities: log Q(A) <= ((a-1)/a) log P(A) + (a-1) R_a(Q||P) and
// log Q(A) >= (a/(a-1)) log P(A) - a R_a(P||Q).
TEST(Rrb, ValidByEnumeration) {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> size(2, 8);
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(size(gen));
    const auto p = random_distribution(gen, n, false);
    const auto q = random_distribution(gen, n, false);
    std::vector<bool> in_a(n);
    for (std::size_t i = 0; i < n; ++i) in_a[i] = (gen() & 1u) != 0;
    in_a[gen() % n] = true;
    double pa = 0.0, qa = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (in_a[i]) {
        pa += p[i];
        qa += q[i];
      }
    }
    for (double a : {1.5, 2.0, 4.0}) {
      RrbInputs up{std::log(pa), AlphaCurve::constant(renyi_divergence(q, p, RenyiOrder::of(a))), BoundDirection::upper};
      RrbInputs lo{std::log(pa), AlphaCurve::constant(renyi_divergence(p, q, RenyiOrder::of(a))), BoundDirection::lower};
      if (std::log(qa) > rrb_upper(up, a) + 1e-12) ++violations;
      if (std::log(qa) < rrb_upper(lo, a) - 1e-12) ++violations;
    }
  }
  EXPECT_EQ(violations, 0);
}

TEST(Rrb, CoinTossAllHeads) {
  // Biased coin (0.7) against a fair coin over three tosses; A = all heads.
  std::vector<double> pw, qw;
  for (int m = 0; m < 8; ++m) {
    const int heads = __builtin_popcount(m);
    pw.push_back(0.125);
    qw.push_back(std::pow(0.7, heads) * std::pow(0.3, 3 - heads));
  }
  const FiniteDistribution p(pw), q(qw);
  for (double a : {1.5, 2.0, 4.0}) {
    RrbInputs in{std::log(0.125), AlphaCurve::constant(renyi_divergence(q, p, RenyiOrder::of(a)))};
    EXPECT_LE(3.0 * std::log(0.7), rrb_upper(in, a));
  }
}

TEST(Rrb, ZeroCurveGivesReferenceAtTheBoundary) {
  RrbInputs in{-0.8, AlphaCurve::zero()};
  const auto r = rrb_optimize(in);
  EXPECT_NEAR(r.bound, -0.8, 1e-6);
  EXPECT_TRUE(r.at_boundary);
}

TEST(Rrb, OptimumMatchesGridScanForRenegingQ2) {
  RenegingInstance inst{2.0, 1.0, 1.0, 2.0};
  RrbInputs in;
  in.ref_log_prob = -reference_decay(inst);
  in.rdr_curve = family_curve(FamilyQ2{0.7, 1.3}, PoissonReference{1.0, std::nullopt});
  const auto r = rrb_optimize(in);
  double best = kInf;
  for (int i = 1; i <= 200000; ++i) best = std::min(best, rrb_upper(in, 1.0 + 20.0 * i / 200000.0));
  EXPECT_NEAR(r.bound, best, 1e-6);
  EXPECT_LE(r.bound, best + 1e-12);
}

TEST(Jackson, Composition) {
  const std::vector<AlphaCurve> none;
  const auto empty = jackson_compose(-0.5, none);
  EXPECT_NEAR(empty.bound, -0.5, 1e-6);

  const AlphaCurve q2 = family_curve(FamilyQ2{0.5, 2.0}, PoissonReference{});
  const std::vector<AlphaCurve> two{q2, q2};
  const auto r = jackson_compose(-1.0, two);
  double best = kInf;
  for (int i = 1; i <= 100000; ++i) {
    const double a = 1.0 + 10.0 * i / 100000.0;
    best = std::min(best, -(a - 1) / a + (a - 1) * 2.0 * q2(a));
  }
  EXPECT_NEAR(r.bound, best, 1e-6);

  const auto zero_ref = jackson_compose(0.0, two);
  EXPECT_NEAR(zero_ref.bound, 0.0, 1e-6);
  EXPECT_GE(zero_ref.bound, 0.0);
}
