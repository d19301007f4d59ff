#include "robustq/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "robustq/families.hpp"

namespace robustq {

namespace {

void check_envelopes(const std::vector<Envelope>& env, std::size_t n, const char* what) {
  if (!env.empty() && env.size() != n) throw std::invalid_argument(std::string(what) + " envelopes: wrong count");
  for (const auto& e : env) {
    if (!(e.a > 0.0 && e.a <= 1.0 && e.b >= 1.0 && std::isfinite(e.b))) {
      throw std::invalid_argument(std::string(what) + " envelopes need 0 < a <= 1 <= b");
    }
  }
}

Envelope envelope_at(const std::vector<Envelope>& env, std::size_t i) { return env.empty() ? Envelope{} : env[i]; }

double class_rdr(const Envelope& e, double rate, double alpha, EnvelopeFamily fam) {
  const PoissonReference ref{rate, std::nullopt};
  if (fam == EnvelopeFamily::q2) return rdr_q2(FamilyQ2{e.a, e.b}, ref, alpha);
  return rdr_q3(FamilyQ3{e.a, e.b}, ref, alpha);
}

double log_sum_exp(const std::vector<double>& v) {
  double m = -kInf;
  for (double t : v) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : v) s += std::exp(t - m);
  return m + std::log(s);
}

}  // namespace

void SchedulingInstance::validate() const {
  const std::size_t n = arrival_rates.size();
  if (n == 0) throw std::invalid_argument("scheduling instance has no classes");
  if (service_rates.size() != n || costs.size() != n) throw std::invalid_argument("rates and costs must have one entry per class");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(arrival_rates[i] > 0.0) || !(service_rates[i] > 0.0) || !(costs[i] > 0.0)) {
      throw std::invalid_argument("rates and costs must be > 0");
    }
  }
  if (!(beta > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("beta and horizon must be > 0");
  check_envelopes(arrival_envelopes, n, "arrival");
  check_envelopes(service_envelopes, n, "service");
}

double SchedulingInstance::traffic_intensity() const {
  double rho = 0.0;
  for (std::size_t i = 0; i < num_classes(); ++i) rho += arrival_rates[i] / service_rates[i];
  return rho;
}

SchedulingInstance SchedulingInstance::with_symmetric_envelopes(double delta) const {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0, 1)");
  SchedulingInstance out = *this;
  out.arrival_envelopes.assign(num_classes(), Envelope{1.0 - delta, 1.0 + delta});
  out.service_envelopes.assign(num_classes(), Envelope{1.0 - delta, 1.0 + delta});
  return out;
}

TiltedRates tilted_rates(const SchedulingInstance& inst, double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("tilted_rates: gamma must be > 0");
  TiltedRates t;
  for (std::size_t i = 0; i < inst.num_classes(); ++i) {
    t.lambda_hat.push_back(inst.arrival_rates[i] * std::expm1(gamma * inst.costs[i]));
    t.mu_hat.push_back(-inst.service_rates[i] * std::expm1(-gamma * inst.costs[i]));
  }
  return t;
}

WResult w_of_gamma(const SchedulingInstance& inst, double gamma) {
  const TiltedRates t = tilted_rates(inst, gamma);
  const std::size_t n = inst.num_classes();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t.mu_hat[a] > t.mu_hat[b]; });
  WResult r;
  r.allocation.assign(n, 0.0);
  double budget = 1.0;
  for (std::size_t i : order) {
    const double u = std::min(budget, t.lambda_hat[i] / t.mu_hat[i]);
    r.allocation[i] = u;
    budget -= u;
    if (budget <= 0.0) budget = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) r.value += std::max(0.0, t.lambda_hat[i] - r.allocation[i] * t.mu_hat[i]);
  return r;
}

double f0_of_alpha(const SchedulingInstance& inst, double alpha) {
  if (!(alpha > 1.0)) throw std::domain_error("f0_of_alpha: alpha must be > 1");
  double s = 0.0;
  for (std::size_t i = 0; i < inst.num_classes(); ++i) {
    s += class_rdr(envelope_at(inst.arrival_envelopes, i), inst.arrival_rates[i], alpha, inst.family);
    s += class_rdr(envelope_at(inst.service_envelopes, i), inst.service_rates[i], alpha, inst.family);
  }
  return s;
}

double scheduling_objective(const SchedulingInstance& inst, double gamma) {
  if (!(gamma > inst.beta)) throw std::domain_error("scheduling_objective: gamma must exceed beta");
  const double gap = gamma - inst.beta;
  const double alpha = gamma / gap;
  const double w = w_of_gamma(inst, gamma).value;
  const double f0 = alpha == kInf ? kInf : f0_of_alpha(inst, alpha);
  // With all envelopes degenerate the f0 term vanishes identically.
  const double div = f0 == 0.0 ? 0.0 : f0 / gap;
  return div + w / gamma;
}

std::vector<std::size_t> priority_index_order(const SchedulingInstance& inst, double gamma) {
  std::vector<double> index(inst.num_classes());
  for (std::size_t i = 0; i < index.size(); ++i) {
    index[i] = gamma == kInf ? inst.service_rates[i] : -inst.service_rates[i] * std::expm1(-gamma * inst.costs[i]);
  }
  std::vector<std::size_t> order(index.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return index[a] > index[b]; });
  return order;
}

RobustBoundResult robust_rs_bound(const SchedulingInstance& inst, double tol) {
  inst.validate();
  const double top = 1.0 / inst.beta;
  auto h = [&](double gt) { return scheduling_objective(inst, 1.0 / gt); };
  // W(gamma) is a minimum over allocations, so h can have concave kinks where the optimal
  // allocation switches; a coarse scan picks the basin before the local search.
  constexpr int kScan = 64;
  int best = 0;
  double best_value = kInf;
  for (int j = 0; j < kScan; ++j) {
    const double v = h((j + 0.5) / kScan * top);
    if (v < best_value) best_value = v, best = j;
  }
  ScalarObjective obj;
  obj.domain = {best == 0 ? 0.0 : (best - 0.5) / kScan * top, best == kScan - 1 ? top : (best + 1.5) / kScan * top};
  obj.eval = h;
  obj.convexity = Convexity::convex;
  obj.seed = (best + 0.5) / kScan * top;
  const OptResult r = minimize_1d(obj, tol);
  if (!std::isfinite(r.value)) throw std::runtime_error("robust_rs_bound: objective is infinite for every gamma");
  RobustBoundResult out;
  out.gamma_star = 1.0 / r.arg;
  const bool at_lower = r.boundary == BoundaryHit::lower && obj.domain.lo == 0.0;
  const bool at_upper = r.boundary == BoundaryHit::upper && obj.domain.hi == top;
  out.at_boundary = at_lower || at_upper;
  out.bound = r.value * inst.horizon;
  // gamma -> beta is the reference endpoint; its limit is finite when f0 vanishes.
  if (at_upper) {
    const double limit = reference_rs_value(inst);
    if (f0_of_alpha(inst, 2.0) == 0.0 && limit < out.bound) {
      out.bound = limit;
      out.gamma_star = inst.beta;
    }
  }
  out.priority_order = priority_index_order(inst, out.gamma_star);
  return out;
}

double reference_rs_value(const SchedulingInstance& inst) {
  return w_of_gamma(inst, inst.beta).value * inst.horizon / inst.beta;
}

double balanced_lower_envelope(double b) {
  if (!(b >= 1.0)) throw std::domain_error("balanced_lower_envelope: b must be >= 1");
  const double target = relative_entropy_rate(b);
  if (target > 1.0) return 0.0;
  double lo = 0.0, hi = 1.0;  // ell decreases from 1 to 0 on [0, 1]
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (relative_entropy_rate(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

void simplex_lattice(std::size_t n, int m, std::vector<int>& cur, std::size_t pos, int remaining,
                     const std::function<void(const std::vector<int>&)>& visit) {
  if (pos + 1 == n) {
    cur[pos] = remaining;
    visit(cur);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    cur[pos] = k;
    simplex_lattice(n, m, cur, pos + 1, remaining - k, visit);
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double rs_duality_check(const FiniteDistribution& q, const FiniteDistribution& p, const std::vector<double>& g,
                        double beta, double gamma, int grid_points) {
  const std::size_t n = p.size();
  if (q.size() != n || g.size() != n) throw std::invalid_argument("rs_duality_check: size mismatch");
  if (!(beta > 0.0 && gamma > beta)) throw std::domain_error("rs_duality_check: need 0 < beta < gamma");
  const RenyiOrder order = RenyiOrder::of(gamma / (gamma - beta));

  std::vector<double> lp;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] > 0.0) lp.push_back(std::log(p[i]) + gamma * g[i]);
  }
  const double lhs = log_sum_exp(lp) / gamma;

  auto rhs = [&](const FiniteDistribution& cand) {
    const double r = renyi_divergence(cand, p, order);
    if (r == kInf) return -kInf;
    std::vector<double> lq;
    for (std::size_t i = 0; i < n; ++i) {
      if (cand[i] > 0.0) lq.push_back(std::log(cand[i]) + beta * g[i]);
    }
    return log_sum_exp(lq) / beta - r / (gamma - beta);
  };

  double best = std::max(rhs(q), rhs(p));
  int m = 1;
  while (binomial(m + 1 + static_cast<int>(n) - 1, static_cast<int>(n) - 1) <= grid_points) ++m;
  std::vector<int> cur(n, 0);
  simplex_lattice(n, m, cur, 0, m, [&](const std::vector<int>& c) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(c[i]) / m;
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= s;
    best = std::max(best, rhs(FiniteDistribution(std::move(w))));
  });
  return best - lhs;
}

std::size_t convexity_probe_m(const std::vector<double>& theta_grid, const std::vector<double>& samples, double tol) {
  if (samples.empty()) throw std::invalid_argument("convexity_probe_m: no samples");
  for (double x : samples) {
    if (!(x > 0.0)) throw std::domain_error("convexity_probe_m: samples must be positive");
  }
  std::vector<double> logs;
  for (double x : samples) logs.push_back(std::log(x));
  const double log_n = std::log(static_cast<double>(samples.size()));
  auto m = [&](double theta) {
    std::vector<double> t(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) t[i] = logs[i] / theta;
    return theta * (log_sum_exp(t) - log_n);
  };
  std::size_t violations = 0;
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    for (std::size_t j = i + 1; j < theta_grid.size(); ++j) {
      const double a = theta_grid[i], b = theta_grid[j];
      if (!(a > 0.0 && b > 0.0)) throw std::domain_error("convexity_probe_m: theta must be > 0");
      if (m(0.5 * (a + b)) > 0.5 * (m(a) + m(b)) + tol) ++violations;
    }
  }
  return violations;
}

}  // namespace robustq
