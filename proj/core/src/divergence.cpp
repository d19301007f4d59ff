#include "robustq/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace robustq {

namespace {

double log_sum_exp(const std::vector<double>& terms) {
  double m = -kInf;
  for (double t : terms) m = std::max(m, t);
  if (m == -kInf || m == kInf) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

void require_same_space(const FiniteDistribution& q, const FiniteDistribution& p) {
  if (q.size() != p.size()) throw std::invalid_argument("distributions live on different index sets");
}

}  // namespace

FiniteDistribution::FiniteDistribution(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw std::invalid_argument("FiniteDistribution: empty weight vector");
  double total = 0.0;
  for (double v : w_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("FiniteDistribution: negative or non-finite weight");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("FiniteDistribution: weights sum to " + std::to_string(total));
  }
}

FiniteDistribution FiniteDistribution::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("FiniteDistribution::uniform: n = 0");
  return FiniteDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

FiniteDistribution FiniteDistribution::product(const FiniteDistribution& a, const FiniteDistribution& b) {
  std::vector<double> w;
  w.reserve(a.size() * b.size());
  for (double x : a.w_)
    for (double y : b.w_) w.push_back(x * y);
  // Renormalise the rounding drift of the products.
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return FiniteDistribution(std::move(w));
}

RenyiOrder RenyiOrder::of(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw std::domain_error("Renyi order must satisfy 1 < alpha < inf, got " + std::to_string(alpha));
  }
  return RenyiOrder(alpha, false);
}

double relative_entropy(const FiniteDistribution& q, const FiniteDistribution& p) {
  require_same_space(q, p);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (p[i] == 0.0) return kInf;
    s += q[i] * std::log(q[i] / p[i]);
  }
  return std::max(0.0, s);
}

double renyi_divergence(const FiniteDistribution& q, const FiniteDistribution& p, RenyiOrder order) {
  if (order.is_limit()) return relative_entropy(q, p);
  require_same_space(q, p);
  const double a = order.alpha();
  std::vector<double> terms;
  terms.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (p[i] == 0.0) return kInf;
    terms.push_back(a * std::log(q[i]) + (1.0 - a) * std::log(p[i]));
  }
  return std::max(0.0, log_sum_exp(terms) / (a * (a - 1.0)));
}

double relative_entropy_rate(double x) {
  if (!(x >= 0.0)) throw std::domain_error("relative_entropy_rate: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (x == kInf) return kInf;
  return x * std::log(x) - x + 1.0;
}

double poisson_renyi_rate(double x, double alpha) {
  if (!(x >= 0.0)) throw std::domain_error("poisson_renyi_rate: x must be >= 0");
  if (!(alpha > 1.0)) throw std::domain_error("poisson_renyi_rate: alpha must be > 1");
  if (x == kInf || alpha == kInf) return kInf;
  const double eps = alpha - 1.0;
  // x (x^eps - 1)/eps - (x - 1), divided by alpha; expm1 keeps alpha near 1 accurate.
  const double head = x == 0.0 ? 0.0 : x * std::expm1(eps * std::log(x)) / eps;
  return std::max(0.0, (head - (x - 1.0)) / alpha);
}

double poisson_renyi_rate(double x, RenyiOrder order) {
  if (order.is_limit()) return relative_entropy_rate(x);
  return poisson_renyi_rate(x, order.alpha());
}

AlphaCurve::AlphaCurve(Fn eval, double alpha_max, bool max_included)
    : eval_(std::move(eval)), alpha_max_(alpha_max), max_included_(max_included && std::isfinite(alpha_max)) {
  if (!eval_) throw std::invalid_argument("AlphaCurve: empty evaluator");
  if (!(alpha_max > 1.0)) throw std::invalid_argument("AlphaCurve: alpha_max must exceed 1");
}

AlphaCurve AlphaCurve::zero() { return constant(0.0); }

AlphaCurve AlphaCurve::constant(double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("AlphaCurve::constant: negative rate");
  return AlphaCurve([r](double) { return r; });
}

AlphaCurve AlphaCurve::single_point(double alpha, double value) {
  AlphaCurve c([value](double) { return value; }, alpha, true);
  c.anchor_ = alpha;
  return c;
}

bool AlphaCurve::contains(double alpha) const noexcept {
  if (anchor_) return std::abs(alpha - *anchor_) <= 1e-12 * *anchor_;
  if (!(alpha > 1.0)) return false;
  return alpha < alpha_max_ || (max_included_ && alpha == alpha_max_);
}

double AlphaCurve::operator()(double alpha) const {
  if (!contains(alpha)) {
    throw std::domain_error("alpha = " + std::to_string(alpha) + " lies outside the curve domain");
  }
  return eval_(alpha);
}

AlphaCurve AlphaCurve::scaled(double factor) const {
  if (!(factor >= 0.0)) throw std::invalid_argument("AlphaCurve::scaled: negative factor");
  AlphaCurve c = *this;
  c.eval_ = [f = eval_, factor](double a) { return factor * f(a); };
  return c;
}

AlphaCurve AlphaCurve::sum(std::span<const AlphaCurve> curves) {
  if (curves.empty()) return zero();
  std::vector<AlphaCurve> parts(curves.begin(), curves.end());
  std::optional<double> anchor;
  for (const auto& c : parts) {
    if (!c.anchor_) continue;
    if (anchor && std::abs(*anchor - *c.anchor_) > 1e-12 * *anchor) {
      throw std::domain_error("AlphaCurve::sum: single-point curves at different alpha");
    }
    anchor = c.anchor_;
  }
  auto total = [parts](double a) {
    double s = 0.0;
    for (const auto& c : parts) s += c(a);
    return s;
  };
  if (anchor) {
    for (const auto& c : parts) {
      if (!c.contains(*anchor)) throw std::domain_error("AlphaCurve::sum: anchor outside a summand's domain");
    }
    return single_point(*anchor, total(*anchor));
  }
  double amax = kInf;
  for (const auto& c : parts) amax = std::min(amax, c.alpha_max_);
  bool included = std::isfinite(amax);
  for (const auto& c : parts) {
    if (c.alpha_max_ == amax && !c.max_included_) included = false;
  }
  return AlphaCurve(total, amax, included);
}

double rrb_upper(const RrbInputs& in, double alpha) {
  const double r = in.rdr_curve(alpha);
  if (r < -1e-12) {
    throw std::domain_error("rdr curve is negative (" + std::to_string(r) + ") at alpha = " + std::to_string(alpha));
  }
  const double L = in.ref_log_prob;
  if (in.direction == BoundDirection::upper) {
    return (1.0 - 1.0 / alpha) * L + (alpha - 1.0) * r;
  }
  return (alpha / (alpha - 1.0)) * L - alpha * r;
}

RrbOptimum rrb_optimize(const RrbInputs& in, double tol) {
  const AlphaCurve& curve = in.rdr_curve;
  const bool upper = in.direction == BoundDirection::upper;
  if (curve.anchor()) {
    return {*curve.anchor(), rrb_upper(in, *curve.anchor()), false};
  }
  ScalarObjective obj;
  obj.domain = {1.0, curve.alpha_max()};
  obj.eval = [&in, upper](double a) {
    const double v = rrb_upper(in, a);
    return upper ? v : -v;
  };
  obj.convexity = Convexity::unknown;
  obj.seed = std::isfinite(curve.alpha_max()) ? 0.5 * (1.0 + curve.alpha_max()) : 2.0;
  OptResult r = minimize_1d(obj, tol);
  RrbOptimum out{r.arg, upper ? r.value : -r.value, r.boundary != BoundaryHit::none};
  if (curve.max_included()) {
    const double at_max = rrb_upper(in, curve.alpha_max());
    if (upper ? at_max < out.bound : at_max > out.bound) out = {curve.alpha_max(), at_max, true};
  }
  return out;
}

RrbOptimum jackson_compose(double gamma_ref, std::span<const AlphaCurve> per_primitive_rdrs) {
  RrbInputs in;
  in.ref_log_prob = gamma_ref;
  in.rdr_curve = AlphaCurve::sum(per_primitive_rdrs);
  return rrb_optimize(in);
}

}  // namespace robustq
