#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "robustq/divergence.hpp"

namespace robustq {

// Bounds a <= ratio <= b on an intensity or density ratio.
struct Envelope {
  double a = 1.0;
  double b = 1.0;
};

// Envelope a_mark <= psi <= b_mark on the mark density ratio, plus optional c(alpha).
struct MarkSpec {
  double a_mark = 1.0;
  double b_mark = 1.0;
  std::function<double(double)> moment_integral{};

  void validate() const;
  double c(double alpha) const { return moment_integral ? moment_integral(alpha) : 0.0; }
};

struct PoissonReference {
  double rate = 1.0;
  std::optional<MarkSpec> mark{};

  void validate() const;
};

// u-bounded divergence at a single order (the constraint only holds at alpha_anchor).
struct FamilyQ1 {
  double u = 0.0;
  double alpha_anchor = 2.0;
};

// Intensity ratio confined to [a, b].
struct FamilyQ2 {
  double a = 1.0;
  double b = 1.0;
};

// As Q2 with the long-run mean ratio pinned to 1.
struct FamilyQ3 {
  double a = 1.0;
  double b = 1.0;
};

// Divergence budget u at alpha0 combined with the mean constraint.
struct FamilyQ4 {
  double alpha0 = 2.0;
  double u = 0.0;
};

using UncertaintyFamily = std::variant<FamilyQ1, FamilyQ2, FamilyQ3, FamilyQ4>;

void validate(const UncertaintyFamily& fam);
std::string family_name(const UncertaintyFamily& fam);

double rdr_q1(const FamilyQ1& fam, const PoissonReference& ref, double alpha);
double rdr_q2(const FamilyQ2& fam, const PoissonReference& ref, double alpha);
double rdr_q3(const FamilyQ3& fam, const PoissonReference& ref, double alpha);
double rdr_q4(const FamilyQ4& fam, const PoissonReference& ref, double alpha);
// (p k(0) + q k(c)) lambda0 with q = (abar0 u + 1)^(-1/(alpha0-1)) and c = 1/q.
double rdr_q4_two_point(const FamilyQ4& fam, const PoissonReference& ref, double alpha);

double rdr(const UncertaintyFamily& fam, const PoissonReference& ref, double alpha);

AlphaCurve family_curve(const UncertaintyFamily& fam, const PoissonReference& ref);

}  // namespace robustq
