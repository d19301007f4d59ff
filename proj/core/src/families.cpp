#include "robustq/families.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace robustq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_envelope(double a, double b, const char* who) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 1.0 && std::isfinite(b))) {
    throw std::invalid_argument(std::string(who) + ": need 0 <= a <= 1 <= b < inf");
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw std::domain_error("alpha must satisfy 1 < alpha < inf");
}

// Mark envelopes multiply the intensity-ratio envelope.
std::pair<double, double> folded(double a, double b, const PoissonReference& ref) {
  if (!ref.mark) return {a, b};
  return {a * ref.mark->a_mark, b * ref.mark->b_mark};
}

}  // namespace

void MarkSpec::validate() const {
  if (!(a_mark > 0.0 && a_mark <= 1.0 && b_mark >= 1.0 && std::isfinite(b_mark))) {
    throw std::invalid_argument("MarkSpec: need 0 < a_mark <= 1 <= b_mark");
  }
  if (moment_integral && std::abs(moment_integral(1.0)) > 1e-9) {
    throw std::invalid_argument("MarkSpec: moment integral must vanish at alpha = 1");
  }
}

void PoissonReference::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("PoissonReference: rate must be > 0");
  if (mark) mark->validate();
}

void validate(const UncertaintyFamily& fam) {
  std::visit(overloaded{
                 [](const FamilyQ1& f) {
                   if (!(f.u >= 0.0)) throw std::invalid_argument("Q1: u must be >= 0");
                   check_alpha(f.alpha_anchor);
                 },
                 [](const FamilyQ2& f) { check_envelope(f.a, f.b, "Q2"); },
                 [](const FamilyQ3& f) {
                   check_envelope(f.a, f.b, "Q3");
                   if (f.a == f.b && f.a != 1.0) throw std::invalid_argument("Q3: a = b != 1 violates the mean constraint");
                 },
                 [](const FamilyQ4& f) {
                   if (!(f.u >= 0.0)) throw std::invalid_argument("Q4: u must be >= 0");
                   if (!(f.alpha0 > 1.0) || !std::isfinite(f.alpha0)) throw std::invalid_argument("Q4: alpha0 must be > 1");
                 },
             },
             fam);
}

std::string family_name(const UncertaintyFamily& fam) {
  static const char* names[] = {"Q1", "Q2", "Q3", "Q4"};
  return names[fam.index()];
}

double rdr_q1(const FamilyQ1& fam, const PoissonReference& ref, double alpha) {
  validate(fam);
  ref.validate();
  if (std::abs(alpha - fam.alpha_anchor) > 1e-12 * fam.alpha_anchor) {
    throw std::domain_error("Q1 family is defined only at its anchor alpha = " + std::to_string(fam.alpha_anchor));
  }
  return fam.u * ref.rate;
}

double rdr_q2(const FamilyQ2& fam, const PoissonReference& ref, double alpha) {
  validate(fam);
  ref.validate();
  check_alpha(alpha);
  const auto [a, b] = folded(fam.a, fam.b, ref);
  return std::max(poisson_renyi_rate(a, alpha), poisson_renyi_rate(b, alpha)) * ref.rate;
}

double rdr_q3(const FamilyQ3& fam, const PoissonReference& ref, double alpha) {
  validate(fam);
  ref.validate();
  check_alpha(alpha);
  const auto [a, b] = folded(fam.a, fam.b, ref);
  if (a == b) return 0.0;  // only a = b = 1 survives validation
  const double p = (b - 1.0) / (b - a);
  const double q = (1.0 - a) / (b - a);
  return (p * poisson_renyi_rate(a, alpha) + q * poisson_renyi_rate(b, alpha)) * ref.rate;
}

double rdr_q4_two_point(const FamilyQ4& fam, const PoissonReference& ref, double alpha) {
  validate(fam);
  ref.validate();
  check_alpha(alpha);
  if (!(alpha < fam.alpha0)) throw std::domain_error("Q4 family requires alpha < alpha0");
  const double abar0 = fam.alpha0 * (fam.alpha0 - 1.0);
  const double log_base = std::log1p(abar0 * fam.u);
  const double q = std::exp(-log_base / (fam.alpha0 - 1.0));
  const double c = std::exp(log_base / (fam.alpha0 - 1.0));
  return ((1.0 - q) * poisson_renyi_rate(0.0, alpha) + q * poisson_renyi_rate(c, alpha)) * ref.rate;
}

double rdr_q4(const FamilyQ4& fam, const PoissonReference& ref, double alpha) {
  validate(fam);
  ref.validate();
  check_alpha(alpha);
  if (!(alpha < fam.alpha0)) throw std::domain_error("Q4 family requires alpha < alpha0");
  const double abar = alpha * (alpha - 1.0);
  const double abar0 = fam.alpha0 * (fam.alpha0 - 1.0);
  const double closed =
      ref.rate / abar * std::expm1((alpha - 1.0) / (fam.alpha0 - 1.0) * std::log1p(abar0 * fam.u));
  const double two_point = rdr_q4_two_point(fam, ref, alpha);
  if (std::abs(closed - two_point) > 1e-10 * (1.0 + std::abs(closed))) {
    throw std::logic_error("Q4 closed form and two-point form disagree");
  }
  return closed;
}

double rdr(const UncertaintyFamily& fam, const PoissonReference& ref, double alpha) {
  return std::visit(overloaded{
                        [&](const FamilyQ1& f) { return rdr_q1(f, ref, alpha); },
                        [&](const FamilyQ2& f) { return rdr_q2(f, ref, alpha); },
                        [&](const FamilyQ3& f) { return rdr_q3(f, ref, alpha); },
                        [&](const FamilyQ4& f) { return rdr_q4(f, ref, alpha); },
                    },
                    fam);
}

AlphaCurve family_curve(const UncertaintyFamily& fam, const PoissonReference& ref) {
  validate(fam);
  ref.validate();
  return std::visit(overloaded{
                        [&](const FamilyQ1& f) { return AlphaCurve::single_point(f.alpha_anchor, rdr_q1(f, ref, f.alpha_anchor)); },
                        [&](const FamilyQ2& f) { return AlphaCurve([f, ref](double a) { return rdr_q2(f, ref, a); }); },
                        [&](const FamilyQ3& f) { return AlphaCurve([f, ref](double a) { return rdr_q3(f, ref, a); }); },
                        [&](const FamilyQ4& f) {
                          return AlphaCurve([f, ref](double a) { return rdr_q4(f, ref, a); }, f.alpha0, false);
                        },
                    },
                    fam);
}

}  // namespace robustq
