#include "robustq/sim/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "robustq/parallel.hpp"

namespace robustq::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double log_ratio(double rate, double ref) { return rate > 0.0 ? std::log(rate / ref) : -kInf; }

// Inter-jump lengths of a renewal path started fresh at 0, plus the final open interval.
void renewal_intervals(const std::vector<double>& jumps, double horizon, std::vector<double>& closed, double& open) {
  closed.clear();
  double last = 0.0;
  for (double t : jumps) {
    closed.push_back(t - last);
    last = t;
  }
  open = horizon - last;
}

// The alpha-tilted renewal law: hazard lambda0^{1-alpha} h^alpha.
struct TiltedRenewal {
  const RenewalSpec& law;
  double ref_rate;
  double alpha;
  double coef;  // lambda0^{1-alpha}

  TiltedRenewal(const RenewalSpec& l, double r, double a) : law(l), ref_rate(r), alpha(a), coef(std::pow(r, 1.0 - a)) {}

  double hazard(double x) const { return coef * std::pow(law.hazard(x), alpha); }
  double cumulative_hazard(double len) const {
    if (!(len > 0.0)) return 0.0;
    if (auto rho = law.exponential_rate()) return coef * std::pow(*rho, alpha) * len;
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / 0.5)));
    const double w = len / pieces;
    double s = 0.0;
    for (int i = 0; i < pieces; ++i) {
      s += boost::math::quadrature::gauss<double, 15>::integrate([&](double x) { return hazard(x); }, i * w, (i + 1) * w);
    }
    return s;
  }

  // Jump times on [0, horizon] by thinning against coef * bound^alpha.
  std::vector<double> sample(double horizon, double bound, CounterRng& rng) const {
    std::vector<double> out;
    const double m = coef * std::pow(bound, alpha);
    if (!(m > 0.0)) return out;
    double last = 0.0;
    for (double s = rng.exponential(m); s <= horizon; s += rng.exponential(m)) {
      if (rng.uniform() * m < hazard(s - last)) {
        out.push_back(s);
        last = s;
      }
    }
    return out;
  }

  double log_likelihood_ratio(const std::vector<double>& jumps, double horizon) const {
    std::vector<double> closed;
    double open = 0.0;
    renewal_intervals(jumps, horizon, closed, open);
    double s = 0.0;
    for (double len : closed) s += std::log(hazard(len)) - cumulative_hazard(len);
    s -= cumulative_hazard(open);
    return s - static_cast<double>(jumps.size()) * std::log(ref_rate) + ref_rate * horizon;
  }
};

CoxPiecewise tilt_cox(const CoxPiecewise& c, double ref, double alpha) {
  const double coef = std::pow(ref, 1.0 - alpha);
  CoxPiecewise t = c;
  for (double& l : t.levels) l = coef * std::pow(l, alpha);
  t.lower = coef * std::pow(c.lower, alpha);
  t.upper = coef * std::pow(c.upper, alpha);
  return t;
}

void require_absolutely_continuous(const PrimitiveProcessSpec& q) {
  if (std::holds_alternative<LatticeProcess>(q) || std::holds_alternative<FixedPoints>(q)) {
    throw std::invalid_argument("deterministic jump times are not absolutely continuous w.r.t. a Poisson reference");
  }
}

struct Moments {
  double log_mean = 0.0;  // log of the mean of exp(v)
  double rel_se = 0.0;    // sd(exp v) / (mean(exp v) sqrt(R))
  bool finite = true;
};

Moments log_mean_exp(const std::vector<double>& v) {
  Moments m;
  const double mx = *std::max_element(v.begin(), v.end());
  if (mx == -kInf) {
    m.log_mean = -kInf;
    m.finite = false;
    return m;
  }
  const double r = static_cast<double>(v.size());
  double s = 0.0, s2 = 0.0;
  for (double x : v) {
    const double w = std::exp(x - mx);
    s += w;
    s2 += w * w;
  }
  const double mean = s / r;
  const double var = std::max(0.0, (s2 - r * mean * mean) / (r - 1.0));
  m.log_mean = mx + std::log(mean);
  m.rel_se = std::sqrt(var / r) / mean;
  return m;
}

}  // namespace

double log_likelihood_ratio(const PrimitiveProcessSpec& q, double ref_rate, const std::vector<double>& jumps,
                            double horizon) {
  if (!(ref_rate > 0.0) || !(horizon >= 0.0)) throw std::invalid_argument("log_likelihood_ratio: bad reference or horizon");
  require_absolutely_continuous(q);
  const double n = static_cast<double>(jumps.size());
  return std::visit(
      overloaded{
          [&](const PoissonProcess& p) {
            const double jump_term = jumps.empty() ? 0.0 : n * log_ratio(p.rate, ref_rate);
            return jump_term - (p.rate - ref_rate) * horizon;
          },
          [&](const CoxPiecewise& c) {
            double s = 0.0;
            for (double t : jumps) s += log_ratio(c.intensity(t), ref_rate);
            return s - c.integrate(horizon, [&](double l) { return l - ref_rate; });
          },
          [&](const RenewalProcess& r) {
            std::vector<double> closed;
            double open = 0.0;
            renewal_intervals(jumps, horizon, closed, open);
            double s = 0.0;
            for (double len : closed) s += r.law.log_density(len);
            s -= r.law.cumulative_hazard(open);
            return s - n * std::log(ref_rate) + ref_rate * horizon;
          },
          [](const auto&) -> double { return kInf; },
      },
      q);
}

McEstimate mc_renyi_rate(const PrimitiveProcessSpec& q, double ref_rate, RenyiOrder order, double horizon, int reps,
                         std::uint64_t seed, const McOptions& opt) {
  if (reps < 2) throw std::invalid_argument("mc_renyi_rate: need at least 2 replications");
  if (!(ref_rate > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("mc_renyi_rate: need ref_rate > 0 and horizon > 0");
  validate(q);
  require_absolutely_continuous(q);

  McEstimate est;
  est.replications = reps;
  est.seed = seed;
  std::vector<double> v(static_cast<std::size_t>(reps));

  if (order.is_limit()) {
    // E_Q[log Lambda]: sample under Q itself.
    est.method = "direct";
    parallel_for(v.size(), opt.threads, [&](std::size_t r) {
      CounterRng rng = make_stream(seed, r, Stream::renewal);
      v[r] = log_likelihood_ratio(q, ref_rate, sample_path(q, horizon, rng), horizon);
    });
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / reps;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    est.point = mean / horizon;
    est.std_err = std::sqrt(ss / (reps - 1.0) / reps) / horizon;
    est.finite = std::isfinite(est.point);
    return est;
  }

  const double alpha = order.alpha();
  const double scale = alpha * (alpha - 1.0) * horizon;
  McMethod method = opt.method;
  std::optional<double> bound;
  if (const auto* r = std::get_if<RenewalProcess>(&q)) {
    bound = r->law.hazard_bound();
    if (!bound) method = McMethod::naive;  // no dominating rate for thinning
  }

  if (method == McMethod::naive) {
    est.method = "naive";
    const PrimitiveProcessSpec ref = PoissonProcess{ref_rate};
    parallel_for(v.size(), opt.threads, [&](std::size_t r) {
      CounterRng rng = make_stream(seed, r, Stream::renewal);
      v[r] = alpha * log_likelihood_ratio(q, ref_rate, sample_path(ref, horizon, rng), horizon);
    });
  } else {
    est.method = "tilted";
    // Lambda^alpha dP/dP~ = exp(alpha log dQ/dP - log dP~/dP) along a path drawn from P~.
    parallel_for(v.size(), opt.threads, [&](std::size_t r) {
      CounterRng rng = make_stream(seed, r, Stream::renewal);
      std::visit(overloaded{
                     [&](const PoissonProcess& p) {
                       const PrimitiveProcessSpec tilted = PoissonProcess{std::pow(ref_rate, 1.0 - alpha) * std::pow(p.rate, alpha)};
                       const auto path = sample_path(tilted, horizon, rng);
                       v[r] = alpha * log_likelihood_ratio(q, ref_rate, path, horizon) -
                              log_likelihood_ratio(tilted, ref_rate, path, horizon);
                     },
                     [&](const CoxPiecewise& c) {
                       const PrimitiveProcessSpec tilted = tilt_cox(c, ref_rate, alpha);
                       const auto path = sample_path(tilted, horizon, rng);
                       v[r] = alpha * log_likelihood_ratio(q, ref_rate, path, horizon) -
                              log_likelihood_ratio(tilted, ref_rate, path, horizon);
                     },
                     [&](const RenewalProcess& rp) {
                       const TiltedRenewal tilted(rp.law, ref_rate, alpha);
                       const auto path = tilted.sample(horizon, *bound, rng);
                       v[r] = alpha * log_likelihood_ratio(q, ref_rate, path, horizon) -
                              tilted.log_likelihood_ratio(path, horizon);
                     },
                     [](const auto&) {},
                 },
                 q);
    });
  }

  const Moments m = log_mean_exp(v);
  est.finite = m.finite;
  est.point = m.finite ? m.log_mean / scale : (scale > 0.0 ? -kInf : kInf);
  est.std_err = m.finite ? m.rel_se / std::abs(scale) : 0.0;
  return est;
}

TailEstimate mc_tail_probability(const RenegingConfig& cfg, double threshold, int reps, std::uint64_t seed,
                                 unsigned threads) {
  if (reps < 2) throw std::invalid_argument("mc_tail_probability: need at least 2 replications");
  RenegingConfig c = cfg;
  c.seed = seed;
  c.replication = 0;
  c.record_log = false;
  const auto runs = simulate_reneging_batch(c, reps, threads);

  TailEstimate out;
  out.threshold = threshold;
  for (const auto& r : runs) out.hits += r.reneging_rate > threshold ? 1 : 0;
  const double n = static_cast<double>(reps);
  const double z = 1.959963984540054;
  out.p_hat = static_cast<double>(out.hits) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (out.p_hat + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(out.p_hat * (1.0 - out.p_hat) / n + z * z / (4.0 * n * n)) / denom;
  out.p_lo = std::max(0.0, centre - half);
  out.p_hi = std::min(1.0, centre + half);

  const double tn = cfg.horizon * cfg.servers;
  McEstimate& e = out.estimate;
  e.replications = reps;
  e.seed = seed;
  e.method = "naive";
  if (out.hits == 0) {
    out.unestimable = true;
    e.finite = false;
    e.point = -kInf;
    e.std_err = 0.0;
  } else {
    e.point = std::log(out.p_hat) / tn;
    e.std_err = (std::log(out.p_hi) - std::log(out.p_lo)) / (2.0 * z * tn);
  }
  return out;
}

}  // namespace robustq::sim
