#include <gtest/gtest.h>

#include <cmath>

#include "robustq/families.hpp"

using namespace robustq;

namespace {

const PoissonReference unit{1.0, std::nullopt};

double k(double x, double a) { return (std::pow(x, a) - a * x + a - 1.0) / (a * (a - 1.0)); }

}  // namespace

TEST(FamilyQ1, ValueAtAnchorOnly) {
  EXPECT_EQ(rdr_q1(FamilyQ1{0.0, 2.0}, unit, 2.0), 0.0);
  EXPECT_DOUBLE_EQ(rdr_q1(FamilyQ1{0.5, 2.0}, unit, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(rdr_q1(FamilyQ1{0.5, 2.0}, PoissonReference{2.0, std::nullopt}, 2.0), 1.0);
  EXPECT_THROW(rdr_q1(FamilyQ1{0.5, 2.0}, unit, 2.5), std::domain_error);
  const AlphaCurve c = family_curve(FamilyQ1{0.5, 3.0}, unit);
  ASSERT_TRUE(c.anchor().has_value());
  EXPECT_EQ(*c.anchor(), 3.0);
}

TEST(FamilyQ2, Examples) {
  EXPECT_EQ(rdr_q2(FamilyQ2{1.0, 1.0}, unit, 2.0), 0.0);
  EXPECT_DOUBLE_EQ(rdr_q2(FamilyQ2{0.5, 2.0}, unit, 2.0), 0.5);
  EXPECT_NEAR(rdr_q2(FamilyQ2{0.7, 1.3}, unit, 2.0), 0.045, 1e-15);
  EXPECT_THROW(rdr_q2(FamilyQ2{1.2, 2.0}, unit, 2.0), std::invalid_argument);
  EXPECT_THROW(rdr_q2(FamilyQ2{0.5, 2.0}, unit, 1.0), std::domain_error);
}

TEST(FamilyQ3, Examples) {
  EXPECT_NEAR(rdr_q3(FamilyQ3{0.5, 2.0}, unit, 2.0), 0.25, 1e-15);
  EXPECT_EQ(rdr_q3(FamilyQ3{1.0, 1.0}, unit, 2.0), 0.0);
  EXPECT_NEAR(rdr_q3(FamilyQ3{1.0 - 1e-9, 1.0 + 1e-9}, unit, 2.0), 0.0, 1e-15);
}

TEST(FamilyQ4, Examples) {
  EXPECT_EQ(rdr_q4(FamilyQ4{2.0, 0.0}, unit, 1.5), 0.0);
  EXPECT_NEAR(rdr_q4(FamilyQ4{2.0, 0.5}, unit, 1.5), (std::sqrt(2.0) - 1.0) / 0.75, 1e-12);
  EXPECT_NEAR(rdr_q4(FamilyQ4{2.0, 0.5}, unit, 2.0 - 1e-9), 0.5, 1e-6);
  EXPECT_THROW(rdr_q4(FamilyQ4{2.0, 0.5}, unit, 2.0), std::domain_error);
  const AlphaCurve c = family_curve(FamilyQ4{2.0, 0.5}, unit);
  EXPECT_EQ(c.alpha_max(), 2.0);
  EXPECT_FALSE(c.max_included());
}

TEST(FamilyQ4, ClosedAndTwoPointFormsAgree) {
  for (double a0 : {1.5, 2.0, 3.0, 6.0}) {
    for (double u : {0.0, 0.05, 0.2, 1.0, 4.0}) {
      for (double t : {0.1, 0.5, 0.9}) {
        const double a = 1.0 + t * (a0 - 1.0);
        const FamilyQ4 f{a0, u};
        EXPECT_NEAR(rdr_q4(f, unit, a), rdr_q4_two_point(f, unit, a), 1e-10 * (1.0 + rdr_q4(f, unit, a)));
      }
    }
  }
}

TEST(Families, FormulasAgainstDirectSubstitution) {
  for (double a : {1.2, 2.0, 3.5}) {
    for (auto [lo, hi] : {std::pair{0.0, 1.5}, std::pair{0.3, 3.0}, std::pair{0.9, 1.1}}) {
      EXPECT_NEAR(rdr_q2(FamilyQ2{lo, hi}, unit, a), std::max(k(lo, a), k(hi, a)), 1e-13);
      const double p = (hi - 1) / (hi - lo), q = (1 - lo) / (hi - lo);
      EXPECT_NEAR(rdr_q3(FamilyQ3{lo, hi}, unit, a), p * k(lo, a) + q * k(hi, a), 1e-13);
    }
  }
}

TEST(Families, Q3BelowQ2AndLinearInRate) {
  for (double lo = 0.0; lo <= 1.0; lo += 0.125) {
    for (double hi = 1.0; hi <= 4.0; hi += 0.375) {
      if (lo == hi) continue;
      for (double a : {1.1, 2.0, 5.0}) {
        const double q2 = rdr_q2(FamilyQ2{lo, hi}, unit, a);
        const double q3 = rdr_q3(FamilyQ3{lo, hi}, unit, a);
        EXPECT_LE(q3, q2 + 1e-14);
        EXPECT_NEAR(rdr_q2(FamilyQ2{lo, hi}, PoissonReference{3.0, std::nullopt}, a), 3.0 * q2, 1e-12);
        EXPECT_NEAR(rdr_q3(FamilyQ3{lo, hi}, PoissonReference{3.0, std::nullopt}, a), 3.0 * q3, 1e-12);
      }
    }
  }
  EXPECT_NEAR(rdr_q4(FamilyQ4{3.0, 0.2}, PoissonReference{2.5, std::nullopt}, 2.0),
              2.5 * rdr_q4(FamilyQ4{3.0, 0.2}, unit, 2.0), 1e-12);
}

TEST(Families, MarksFoldIntoTheEnvelope) {
  PoissonReference marked{1.0, MarkSpec{0.8, 1.25, {}}};
  EXPECT_DOUBLE_EQ(rdr_q2(FamilyQ2{0.5, 2.0}, marked, 2.0), rdr_q2(FamilyQ2{0.4, 2.5}, unit, 2.0));
}

TEST(Families, CurvesMatchPointwise) {
  const AlphaCurve c = family_curve(FamilyQ2{0.5, 2.0}, unit);
  for (double a : {1.5, 2.0, 3.0}) EXPECT_EQ(c(a), rdr_q2(FamilyQ2{0.5, 2.0}, unit, a));
  const AlphaCurve z = family_curve(FamilyQ2{1.0, 1.0}, unit);
  for (double a : {1.01, 2.0, 50.0}) EXPECT_EQ(z(a), 0.0);
  EXPECT_EQ(family_name(FamilyQ3{0.5, 2.0}), "Q3");
}
