#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "robustq/convex_opt.hpp"

namespace robustq {

class FiniteDistribution {
 public:
  // Weights must be nonnegative and sum to 1 within 1e-12.
  explicit FiniteDistribution(std::vector<double> weights);

  static FiniteDistribution uniform(std::size_t n);
  static FiniteDistribution product(const FiniteDistribution& a, const FiniteDistribution& b);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> weights() const noexcept { return w_; }

 private:
  std::vector<double> w_;
};

// alpha > 1, or the alpha -> 1 limit (relative entropy).
class RenyiOrder {
 public:
  static RenyiOrder of(double alpha);
  static RenyiOrder relative_entropy() noexcept { return RenyiOrder(1.0, true); }

  bool is_limit() const noexcept { return limit_; }
  double alpha() const noexcept { return alpha_; }

 private:
  RenyiOrder(double a, bool limit) noexcept : alpha_(a), limit_(limit) {}
  double alpha_;
  bool limit_;
};

// R_alpha(q || p); +inf when q is not absolutely continuous with respect to p.
double renyi_divergence(const FiniteDistribution& q, const FiniteDistribution& p, RenyiOrder order);
double relative_entropy(const FiniteDistribution& q, const FiniteDistribution& p);

// k_alpha(x) = (x^alpha - alpha x + alpha - 1) / (alpha (alpha - 1)); the limit tag gives ell(x).
double poisson_renyi_rate(double x, RenyiOrder order);
double poisson_renyi_rate(double x, double alpha);
// ell(x) = x log x - x + 1.
double relative_entropy_rate(double x);

// Nonnegative function of alpha on (1, alpha_max) or (1, alpha_max], or a single anchor point.
class AlphaCurve {
 public:
  using Fn = std::function<double(double)>;

  AlphaCurve(Fn eval, double alpha_max = kInf, bool max_included = false);

  static AlphaCurve zero();
  static AlphaCurve constant(double r);
  static AlphaCurve single_point(double alpha, double value);
  // Pointwise sum on the common domain; throws if the domains do not meet.
  static AlphaCurve sum(std::span<const AlphaCurve> curves);

  bool contains(double alpha) const noexcept;
  double operator()(double alpha) const;

  double alpha_max() const noexcept { return alpha_max_; }
  bool max_included() const noexcept { return max_included_; }
  std::optional<double> anchor() const noexcept { return anchor_; }

  AlphaCurve scaled(double factor) const;

 private:
  Fn eval_;
  double alpha_max_;
  bool max_included_;
  std::optional<double> anchor_;
};

enum class BoundDirection { upper, lower };

struct RrbInputs {
  double ref_log_prob = 0.0;
  AlphaCurve rdr_curve = AlphaCurve::zero();
  BoundDirection direction = BoundDirection::upper;
};

// Upper: ((a-1)/a) L + (a-1) r(a).  Lower: (a/(a-1)) L - a r(a).
double rrb_upper(const RrbInputs& in, double alpha);

struct RrbOptimum {
  double alpha_star = 0.0;
  double bound = 0.0;
  // The optimum was approached at an end of the alpha domain.
  bool at_boundary = false;
};

// Infimum over alpha of the upper form (supremum of the lower form), searched on log(alpha - 1).
RrbOptimum rrb_optimize(const RrbInputs& in, double tol = 1e-10);

RrbOptimum jackson_compose(double gamma_ref, std::span<const AlphaCurve> per_primitive_rdrs);

}  // namespace robustq
