#include "robustq/renewal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "robustq/quadrature.hpp"
#include "robustq/sim/rng.hpp"

namespace robustq {

// ---------------------------------------------------------------------------
// Models

struct RenewalSpec::Model {
  virtual ~Model() = default;
  std::string name;

  virtual double log_density(double x) const = 0;
  virtual double survival(double x) const = 0;
  virtual double cumulative_hazard(double x) const {
    const double s = survival(x);
    return s > 0.0 ? -std::log(s) : kInf;
  }
  virtual double hazard(double x) const {
    const double ch = cumulative_hazard(x);
    if (ch == kInf) return kInf;
    return std::exp(log_density(x) + ch);
  }
  virtual double H_bar() const { return numeric_H_bar(); }
  virtual bool full_support() const { return numeric_full_support(); }
  virtual double mean() const = 0;
  virtual double sample(sim::CounterRng& rng) const = 0;
  virtual std::optional<double> hazard_bound() const { return std::nullopt; }

  double H(double x) const {
    const double lg = log_density(x);
    return lg == -kInf ? -kInf : x + lg;
  }

  double numeric_H_bar() const {
    std::vector<double> xs{0.0};
    for (double x = 1e-9; x < 2e6; x *= 1.2) xs.push_back(x);
    std::size_t jmax = 0;
    std::vector<double> hs(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
      hs[j] = H(xs[j]);
      if (std::isnan(hs[j])) hs[j] = -kInf;
      if (hs[j] == kInf) return kInf;
      if (hs[j] > hs[jmax]) jmax = j;
    }
    if (hs[jmax] == -kInf) throw std::invalid_argument("density vanishes everywhere");
    if (jmax + 1 == xs.size()) return kInf;
    // Growth toward 0 faster than any constant signals an unbounded H.
    if (jmax <= 1 && hs[1] > hs[20] + 0.5 * std::log(xs[20] / xs[1])) return kInf;
    const std::size_t lo = jmax == 0 ? 0 : jmax - 1;
    const std::size_t hi = std::min(jmax + 1, xs.size() - 1);
    ScalarObjective obj;
    obj.domain = {xs[lo], xs[hi]};
    obj.eval = [this](double x) { return H(x); };
    obj.seed = (xs[jmax] > xs[lo] && xs[jmax] < xs[hi]) ? std::optional<double>(xs[jmax]) : std::nullopt;
    const double refined = maximize_1d(obj, 1e-12).value;
    return std::max(hs[jmax], refined);
  }

  bool numeric_full_support() const {
    for (double x = 1e-6; x < 1e3; x *= 1.05) {
      if (log_density(x) == -kInf) return false;
    }
    return true;
  }
};

namespace {

double log_sum_exp(std::span<const double> v) {
  double m = -kInf;
  for (double t : v) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : v) s += std::exp(t - m);
  return m + std::log(s);
}

struct ExponentialModel final : RenewalSpec::Model {
  double rho;
  explicit ExponentialModel(double r) : rho(r) { name = "exponential"; }
  double log_density(double x) const override { return x < 0.0 ? -kInf : std::log(rho) - rho * x; }
  double survival(double x) const override { return x <= 0.0 ? 1.0 : std::exp(-rho * x); }
  double cumulative_hazard(double x) const override { return x <= 0.0 ? 0.0 : rho * x; }
  double hazard(double) const override { return rho; }
  double H_bar() const override { return rho >= 1.0 ? std::log(rho) : kInf; }
  bool full_support() const override { return true; }
  double mean() const override { return 1.0 / rho; }
  double sample(sim::CounterRng& rng) const override { return rng.exponential(rho); }
  std::optional<double> hazard_bound() const override { return rho; }
};

struct GammaModel final : RenewalSpec::Model {
  double k, rho, log_norm;
  GammaModel(double shape, double rate)
      : k(shape), rho(rate), log_norm(shape * std::log(rate) - std::lgamma(shape)) {
    name = "gamma";
  }
  double log_density(double x) const override {
    if (x < 0.0) return -kInf;
    if (x == 0.0) {
      if (k == 1.0) return std::log(rho);
      return k > 1.0 ? -kInf : kInf;
    }
    return log_norm + (k - 1.0) * std::log(x) - rho * x;
  }
  double survival(double x) const override { return x <= 0.0 ? 1.0 : boost::math::gamma_q(k, rho * x); }
  double cumulative_hazard(double x) const override {
    if (x <= 0.0) return 0.0;
    const double s = survival(x);
    if (s > 1e-280) return -std::log(s);
    // Asymptotic tail: S ~ g(x) / (rho (1 - (k-1)/(rho x))^{-1}).
    const double z = rho * x;
    const double h = rho / (1.0 + (k - 1.0) / z);
    return std::log(h) - log_density(x);
  }
  double H_bar() const override {
    if (k == 1.0) return rho >= 1.0 ? std::log(rho) : kInf;
    if (k < 1.0 || rho <= 1.0) return kInf;
    const double x = (k - 1.0) / (rho - 1.0);
    return x + log_density(x);
  }
  bool full_support() const override { return true; }
  double mean() const override { return k / rho; }
  double sample(sim::CounterRng& rng) const override { return boost::math::gamma_p_inv(k, rng.uniform()) / rho; }
  // The hazard increases to rho when k >= 1 and is unbounded at 0 otherwise.
  std::optional<double> hazard_bound() const override {
    if (k >= 1.0) return rho;
    return std::nullopt;
  }
};

struct PhaseTypeModel final : RenewalSpec::Model {
  std::vector<double> w, r, log_w;
  PhaseTypeModel(std::vector<double> weights, std::vector<double> rates) : w(std::move(weights)), r(std::move(rates)) {
    name = "phase_type";
    for (double v : w) log_w.push_back(std::log(v));
  }
  double log_density(double x) const override {
    if (x < 0.0) return -kInf;
    std::vector<double> t(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) t[i] = log_w[i] + std::log(r[i]) - r[i] * x;
    return log_sum_exp(t);
  }
  double cumulative_hazard(double x) const override {
    if (x <= 0.0) return 0.0;
    std::vector<double> t(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) t[i] = log_w[i] - r[i] * x;
    return -log_sum_exp(t);
  }
  double survival(double x) const override { return std::exp(-cumulative_hazard(x)); }
  double H_bar() const override {
    // The mixture hazard decreases from sum w r to min r, so H is monotone when min r >= 1.
    if (*std::min_element(r.begin(), r.end()) >= 1.0) return log_density(0.0);
    return numeric_H_bar();
  }
  bool full_support() const override { return true; }
  double mean() const override {
    double m = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) m += w[i] / r[i];
    return m;
  }
  double sample(sim::CounterRng& rng) const override {
    double u = rng.uniform();
    std::size_t i = 0;
    for (; i + 1 < w.size(); ++i) {
      if (u < w[i]) break;
      u -= w[i];
    }
    return rng.exponential(r[i]);
  }
  std::optional<double> hazard_bound() const override { return envelope_C(); }
  double envelope_C() const { return std::inner_product(w.begin(), w.end(), r.begin(), 0.0); }
  double envelope_sigma() const { return *std::min_element(r.begin(), r.end()); }
};

struct TabulatedModel final : RenewalSpec::Model {
  std::vector<double> x, g, cdf;
  double g_max = 0.0;
  TabulatedModel(std::vector<double> xs, std::vector<double> gs) : x(std::move(xs)), g(std::move(gs)) {
    name = "tabulated";
    if (x.size() < 2 || x.size() != g.size()) throw std::invalid_argument("tabulated density needs >= 2 matching (x, g) rows");
    if (x.front() < 0.0) throw std::invalid_argument("tabulated density: x must be >= 0");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(g[i] >= 0.0) || !std::isfinite(g[i])) throw std::invalid_argument("tabulated density: g must be finite and >= 0");
      if (i > 0 && !(x[i] > x[i - 1])) throw std::invalid_argument("tabulated density: x must be strictly increasing");
    }
    cdf.assign(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) cdf[i] = cdf[i - 1] + 0.5 * (g[i] + g[i - 1]) * (x[i] - x[i - 1]);
    const double total = cdf.back();
    if (std::abs(total - 1.0) > 1e-6) {
      throw std::invalid_argument("tabulated density integrates to " + std::to_string(total) + ", expected 1");
    }
    for (double& v : g) v /= total;
    for (double& v : cdf) v /= total;
    g_max = *std::max_element(g.begin(), g.end());
  }
  std::size_t segment(double t) const {
    return static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
  }
  double dens(double t) const {
    if (t < x.front() || t > x.back()) return 0.0;
    if (t == x.back()) return g.back();
    const std::size_t i = segment(t);
    const double u = (t - x[i]) / (x[i + 1] - x[i]);
    return g[i] + u * (g[i + 1] - g[i]);
  }
  double log_density(double t) const override {
    const double d = dens(t);
    return d > 0.0 ? std::log(d) : -kInf;
  }
  double survival(double t) const override {
    if (t <= x.front()) return 1.0;
    if (t >= x.back()) return 0.0;
    const std::size_t i = segment(t);
    const double dx = t - x[i];
    const double slope = (g[i + 1] - g[i]) / (x[i + 1] - x[i]);
    return std::max(0.0, 1.0 - (cdf[i] + g[i] * dx + 0.5 * slope * dx * dx));
  }
  double H_bar() const override {
    double best = -kInf;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      if (g[i] == 0.0 && g[i + 1] == 0.0) continue;
      // x + log(linear) is concave on each segment.
      ScalarObjective obj;
      obj.domain = {x[i], x[i + 1]};
      obj.eval = [this](double t) { return H(t); };
      obj.convexity = Convexity::concave;
      best = std::max({best, H(x[i]), H(x[i + 1]), maximize_1d(obj, 1e-12).value});
    }
    return best;
  }
  bool full_support() const override { return false; }
  double mean() const override {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i], b = x[i + 1], ga = g[i], gb = g[i + 1];
      const double s = (gb - ga) / (b - a);
      const double c0 = ga - s * a;  // g = c0 + s t on the segment
      m += c0 * (b * b - a * a) / 2.0 + s * (b * b * b - a * a * a) / 3.0;
    }
    return m;
  }
  double sample(sim::CounterRng& rng) const override {
    for (;;) {
      const double t = x.front() + (x.back() - x.front()) * rng.uniform();
      if (rng.uniform() * g_max <= dens(t)) return t;
    }
  }
};

struct CustomModel final : RenewalSpec::Model {
  std::function<double(double)> log_g, surv;
  std::function<double(const std::function<double()>&)> sampler;
  double mean_value;
  CustomModel(std::string n, std::function<double(double)> lg, std::function<double(double)> s,
              std::function<double(const std::function<double()>&)> smp)
      : log_g(std::move(lg)), surv(std::move(s)), sampler(std::move(smp)) {
    name = std::move(n);
    mean_value = std::exp(log_integral_half_line([this](double t) {
      const double v = surv(t);
      return v > 0.0 ? std::log(v) : -kInf;
    }));
  }
  double log_density(double t) const override { return t < 0.0 ? -kInf : log_g(t); }
  double survival(double t) const override { return t <= 0.0 ? 1.0 : surv(t); }
  double mean() const override { return mean_value; }
  double sample(sim::CounterRng& rng) const override {
    if (!sampler) throw std::logic_error("custom renewal law '" + name + "' has no sampler");
    return sampler([&rng] { return rng.uniform(); });
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// RenewalSpec

RenewalSpec RenewalSpec::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("exponential: rate must be > 0");
  return RenewalSpec(std::make_shared<ExponentialModel>(rate));
}

RenewalSpec RenewalSpec::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw std::invalid_argument("gamma: shape and rate must be > 0");
  }
  return RenewalSpec(std::make_shared<GammaModel>(shape, rate));
}

RenewalSpec RenewalSpec::phase_type(std::vector<double> weights, std::vector<double> rates) {
  if (weights.empty() || weights.size() != rates.size()) throw std::invalid_argument("phase_type: weights and rates must match");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !(rates[i] > 0.0)) throw std::invalid_argument("phase_type: weights and rates must be > 0");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("phase_type: weights must sum to 1");
  return RenewalSpec(std::make_shared<PhaseTypeModel>(std::move(weights), std::move(rates)));
}

RenewalSpec RenewalSpec::tabulated(std::vector<double> x, std::vector<double> g) {
  return RenewalSpec(std::make_shared<TabulatedModel>(std::move(x), std::move(g)));
}

RenewalSpec RenewalSpec::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open density file " + path.string());
  std::vector<double> xs, gs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": expected 'x,g'");
    auto parse = [&](std::string_view s, double& out) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
      const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
      return res.ec == std::errc() && res.ptr == s.data() + s.size();
    };
    double x = 0.0, g = 0.0;
    const std::string_view sv(line);
    const bool ok = parse(sv.substr(0, comma), x) && parse(sv.substr(comma + 1), g);
    if (!ok) {
      if (xs.empty() && line_no == 1) continue;  // header row
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
    xs.push_back(x);
    gs.push_back(g);
  }
  return tabulated(std::move(xs), std::move(gs));
}

RenewalSpec RenewalSpec::custom(std::string name, std::function<double(double)> log_density,
                                std::function<double(double)> survival,
                                std::function<double(const std::function<double()>&)> sampler) {
  return RenewalSpec(std::make_shared<CustomModel>(std::move(name), std::move(log_density), std::move(survival),
                                                   std::move(sampler)));
}

RenewalSpec RenewalSpec::with_mark(MarkSpec mark) const {
  mark.validate();
  RenewalSpec s = *this;
  s.mark_ = std::move(mark);
  return s;
}

const std::string& RenewalSpec::family() const { return model_->name; }
double RenewalSpec::density(double x) const { return std::exp(model_->log_density(x)); }
double RenewalSpec::log_density(double x) const { return model_->log_density(x); }
double RenewalSpec::survival(double x) const { return model_->survival(x); }
double RenewalSpec::cumulative_hazard(double x) const { return model_->cumulative_hazard(x); }
double RenewalSpec::hazard(double x) const { return model_->hazard(x); }
double RenewalSpec::H(double x) const { return model_->H(x); }
double RenewalSpec::H_bar() const { return model_->H_bar(); }
bool RenewalSpec::full_support() const { return model_->full_support(); }
double RenewalSpec::mean() const { return model_->mean(); }
double RenewalSpec::sample(sim::CounterRng& rng) const { return model_->sample(rng); }
std::optional<double> RenewalSpec::hazard_bound() const { return model_->hazard_bound(); }

std::optional<double> RenewalSpec::exponential_rate() const {
  if (const auto* m = dynamic_cast<const ExponentialModel*>(model_.get())) return m->rho;
  return std::nullopt;
}

std::optional<std::pair<double, double>> RenewalSpec::gamma_parameters() const {
  if (const auto* m = dynamic_cast<const GammaModel*>(model_.get())) return std::pair{m->k, m->rho};
  if (const auto* m = dynamic_cast<const ExponentialModel*>(model_.get())) return std::pair{1.0, m->rho};
  return std::nullopt;
}

std::optional<std::pair<double, double>> RenewalSpec::phase_type_envelope() const {
  if (const auto* m = dynamic_cast<const PhaseTypeModel*>(model_.get())) return std::pair{m->envelope_C(), m->envelope_sigma()};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Exponential tilt

ExponentialTilt::ExponentialTilt(RenewalSpec spec) : spec_(std::move(spec)) {}

double ExponentialTilt::beta(double l1, double l2) const {
  if (std::isnan(l1) || std::isnan(l2)) return kInf;
  const RenewalSpec& s = spec_;
  auto phi = [&](double y) {
    if (l2 == 0.0) return (l1 - 1.0) * y;
    const double lg = s.log_density(y);
    if (lg == -kInf) return l2 > 0.0 ? -kInf : kInf;
    if (lg == kInf) return l2 > 0.0 ? kInf : -kInf;
    return (l1 + l2 - 1.0) * y + l2 * lg;
  };
  // Tail exponent probe: the integrand must decay exponentially.
  const double y1 = 1e4, y2 = 2e4;
  const double p1 = phi(y1), p2 = phi(y2);
  if (std::isfinite(p1) && std::isfinite(p2) && p2 >= p1) return kInf;
  return log_integral_half_line(phi);
}

bool ExponentialTilt::finite_near_origin(double eps) const {
  for (double a : {-eps, eps})
    for (double b : {-eps, eps})
      if (!std::isfinite(beta(a, b))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Bounds

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw std::domain_error("alpha must satisfy 1 < alpha < inf");
}

double normalise(double G, const RenewalSpec& spec, double alpha) {
  return (std::max(G, 0.0) + spec.mark_moment(alpha)) / (alpha * (alpha - 1.0));
}

// sup over log(theta) of f: coarse scan, then golden refinement around the best scan point.
struct ThetaSearch {
  double theta = 0.0;
  double value = -kInf;
  bool at_edge = false;
  int evaluations = 0;
};

ThetaSearch theta_sup(const std::function<double(double)>& G, const BoundOptions& opt, std::optional<double> warm) {
  const int n = std::max(3, opt.theta_scan_points);
  std::vector<double> lts;
  for (int i = 0; i < n; ++i) lts.push_back(opt.log_theta_lo + (opt.log_theta_hi - opt.log_theta_lo) * i / (n - 1));
  if (warm && std::isfinite(*warm) && *warm > opt.log_theta_lo && *warm < opt.log_theta_hi) {
    lts.push_back(*warm);
    std::sort(lts.begin(), lts.end());
  }
  ThetaSearch out;
  std::vector<double> vals(lts.size());
  std::size_t jbest = 0;
  for (std::size_t j = 0; j < lts.size(); ++j) {
    vals[j] = G(std::exp(lts[j]));
    ++out.evaluations;
    if (std::isnan(vals[j])) vals[j] = -kInf;
    if (vals[j] > vals[jbest]) jbest = j;
  }
  out.theta = std::exp(lts[jbest]);
  out.value = vals[jbest];
  out.at_edge = jbest == 0 || jbest + 1 == lts.size();
  if (!out.at_edge && std::isfinite(out.value)) {
    ScalarObjective obj;
    obj.domain = {lts[jbest - 1], lts[jbest + 1]};
    obj.eval = [&](double lt) { return G(std::exp(lt)); };
    obj.convexity = Convexity::concave;
    obj.seed = lts[jbest];
    const OptResult r = maximize_1d(obj, opt.tol);
    out.evaluations += r.iterations;
    if (r.value > out.value) {
      out.value = r.value;
      out.theta = std::exp(r.arg);
    }
  }
  return out;
}

// phi*(x1) = sup_l1 [l1 x1 - beta(l1, alpha)].
double partial_conjugate(const ExponentialTilt& tilt, double alpha, double x1) {
  if (!(x1 > 0.0)) return kInf;
  ScalarObjective obj;
  obj.eval = [&](double l1) {
    const double b = tilt.beta(l1, alpha);
    return b == kInf ? -kInf : l1 * x1 - b;
  };
  obj.convexity = Convexity::concave;
  obj.seed = 0.0;
  const OptResult r = maximize_1d(obj, 1e-10);
  if (r.boundary != BoundaryHit::none) return kInf;
  return r.value;
}

void require_g2_hypotheses(const RenewalSpec& spec, const ExponentialTilt& tilt, const BoundOptions& opt) {
  if (opt.override_hypotheses) return;
  if (!std::isfinite(spec.H_bar())) throw HypothesisError("H_bar = sup H is infinite for this density");
  if (!spec.full_support()) {
    throw HypothesisError("density vanishes on part of (0, inf), so beta is not finite near the origin; use rough or g1");
  }
  if (!tilt.finite_near_origin()) throw HypothesisError("beta is not finite in a neighbourhood of the origin");
}

}  // namespace

double exponential_rdr(double rho, double alpha) {
  check_alpha(alpha);
  if (!(rho > 0.0)) throw std::domain_error("exponential_rdr: rho must be > 0");
  return (std::pow(rho, alpha) - 1.0 - alpha * (rho - 1.0)) / (alpha * (alpha - 1.0));
}

double gamma_closed_form(double k, double rho, double alpha) {
  check_alpha(alpha);
  if (!(k >= 1.0) || !(rho > 1.0)) throw std::domain_error("gamma_closed_form: need k >= 1 and rho > 1");
  const double m = 1.0 + alpha * (k - 1.0);
  const double log_a = std::lgamma(m) - alpha * std::lgamma(k) + alpha * k * std::log(rho);
  return (std::exp(log_a / m) - alpha * (rho - 1.0) - 1.0) / (alpha * (alpha - 1.0));
}

double phase_type_envelope_bound(double C, double sigma, double alpha) {
  check_alpha(alpha);
  if (!(sigma > 1.0) || !(C >= sigma)) throw std::domain_error("phase_type_envelope_bound: need C >= sigma > 1");
  return (std::pow(C, alpha) - 1.0 - alpha * (sigma - 1.0)) / (alpha * (alpha - 1.0));
}

double rough_bound(const RenewalSpec& spec, double alpha) {
  check_alpha(alpha);
  const double hb = spec.H_bar();
  if (!std::isfinite(hb)) return kInf;
  return (std::expm1(alpha * hb) + spec.mark_moment(alpha)) / (alpha * (alpha - 1.0));
}

BoundValue g1_bound(const RenewalSpec& spec, double alpha, const BoundOptions& opt) {
  check_alpha(alpha);
  const ExponentialTilt tilt(spec);
  BoundValue out;
  // s = log(q - 1); p = q / (q - 1), so gamma(q alpha)^{p/q} = exp(log gamma(q alpha) / (q - 1)).
  ScalarObjective obj;
  obj.domain = {-30.0, 25.0};
  obj.seed = 0.0;
  obj.eval = [&](double s) {
    const double qm1 = std::exp(s);
    const double q = 1.0 + qm1;
    const double L = tilt.log_gamma(q * alpha);
    if (L == kInf) return kInf;
    return qm1 / q * std::expm1(L / qm1);
  };
  const OptResult r = minimize_1d(obj, opt.tol);
  double G = r.value;
  out.diagnostics.theta_star = 1.0 + std::exp(r.arg);  // the optimal q
  out.diagnostics.evaluations = r.iterations;
  // q -> inf limit of the objective.
  const double hb = spec.H_bar();
  if (std::isfinite(hb) && std::expm1(alpha * hb) < G) {
    G = std::expm1(alpha * hb);
    out.diagnostics.theta_star = kInf;
    out.diagnostics.note = "infimum at the q -> inf limit";
  }
  if (r.boundary == BoundaryHit::upper && out.diagnostics.note.empty()) {
    out.diagnostics.note = "q-search reached the cap q - 1 = e^25";
  }
  out.diagnostics.inner_value = G;
  out.value = normalise(G, spec, alpha);
  return out;
}

double g2_nested_inner(const ExponentialTilt& tilt, double alpha, double theta) {
  // -phi* is concave; its unconstrained maximiser x_hat is found once per call.
  ScalarObjective obj;
  obj.domain = {0.0, kInf};
  obj.eval = [&](double x1) { return -partial_conjugate(tilt, alpha, x1); };
  obj.convexity = Convexity::concave;
  obj.seed = 1.0;
  const OptResult r = maximize_1d(obj, 1e-10);
  const double x_hat = r.arg;
  if (x_hat <= 1.0 / theta) return theta * r.value;
  return -theta * partial_conjugate(tilt, alpha, 1.0 / theta);
}

double g2_shortcut_inner(const ExponentialTilt& tilt, double alpha, double theta) {
  ScalarObjective obj;
  obj.eval = [&](double l1) { return std::max(-l1, 0.0) + theta * tilt.beta(l1, alpha); };
  obj.convexity = Convexity::convex;
  obj.seed = 0.0;
  return minimize_1d(obj, 1e-10).value;
}

double g3_dual_inner(const ExponentialTilt& tilt, double alpha, double theta) {
  ScalarObjective obj;
  obj.eval = [&](double l1) { return theta * tilt.beta(l1, alpha) - l1; };
  obj.convexity = Convexity::convex;
  obj.seed = 0.0;
  return minimize_1d(obj, 1e-10).value;
}

double g3_primal_inner(const ExponentialTilt& tilt, double alpha, double theta) {
  const double x1 = 1.0 / theta;
  const Function2d beta = [&tilt](double a, double b) { return tilt.beta(a, b); };
  std::array<double, 2> warm{0.0, 0.0};
  ScalarObjective obj;
  obj.eval = [&](double x2) {
    ConjugateOptions co;
    co.warm_start = warm;
    co.fenchel_young_probes = 0;
    co.tol = 1e-11;
    const ConjugateResult c = fenchel_conjugate_2d(beta, {x1, x2}, co);
    if (c.value == kInf) return -kInf;
    warm = c.maximizer;
    return alpha * x2 - c.value;
  };
  obj.convexity = Convexity::concave;
  obj.seed = 0.0;
  const OptResult r = maximize_1d(obj, 1e-9);
  return theta * r.value;
}

double legendre_transform(const ExponentialTilt& tilt, std::array<double, 2> x, const ConjugateOptions& opt) {
  if (!tilt.finite_near_origin()) throw HypothesisError("beta is not finite in a neighbourhood of the origin");
  const Function2d beta = [&tilt](double a, double b) { return tilt.beta(a, b); };
  return fenchel_conjugate_2d(beta, x, opt).value;
}

BoundValue g2_bound(const RenewalSpec& spec, double alpha, const BoundOptions& opt) {
  check_alpha(alpha);
  const ExponentialTilt tilt(spec);
  require_g2_hypotheses(spec, tilt, opt);

  // x_hat and sup(-phi*) do not depend on theta.
  ScalarObjective outer;
  outer.domain = {0.0, kInf};
  outer.eval = [&](double x1) { return -partial_conjugate(tilt, alpha, x1); };
  outer.convexity = Convexity::concave;
  outer.seed = 1.0;
  const OptResult top = maximize_1d(outer, 1e-10);
  const double x_hat = top.arg;

  auto G = [&](double theta) {
    if (x_hat <= 1.0 / theta) return theta * top.value;
    return -theta * partial_conjugate(tilt, alpha, 1.0 / theta);
  };
  const double hb = spec.H_bar();
  const std::optional<double> warm = std::isfinite(hb) ? std::optional<double>(alpha * hb) : std::nullopt;
  const ThetaSearch ts = theta_sup(G, opt, warm);

  BoundValue out;
  out.diagnostics.theta_star = ts.theta;
  out.diagnostics.inner_value = ts.value;
  out.diagnostics.evaluations = ts.evaluations;
  if (ts.at_edge) {
    out.diagnostics.note = "theta-search optimum at the edge of the probed range [e^" + std::to_string(opt.log_theta_lo) +
                           ", e^" + std::to_string(opt.log_theta_hi) + "]";
  }
  // Shortcut upper bound checked at the optimum and at a spread of probe points.
  double gap = -kInf;
  for (double lt : {std::log(ts.theta), -2.0, 0.0, 2.0}) {
    const double th = std::exp(lt);
    gap = std::max(gap, G(th) - g2_shortcut_inner(tilt, alpha, th));
  }
  out.diagnostics.shortcut_gap = gap;
  out.value = normalise(ts.value, spec, alpha);
  return out;
}

BoundValue g3_bound(const RenewalSpec& spec, double alpha, const BoundOptions& opt) {
  check_alpha(alpha);
  const ExponentialTilt tilt(spec);
  require_g2_hypotheses(spec, tilt, opt);
  if (!opt.override_hypotheses) {
    for (double s : {-1.0, -4.0, -16.0}) {
      if (!std::isfinite(tilt.log_gamma(s))) {
        throw HypothesisError("gamma(" + std::to_string(s) + ") is infinite; g3 requires gamma(s) < inf for s <= 0, use g2");
      }
    }
  }
  auto G = [&](double theta) { return g3_dual_inner(tilt, alpha, theta); };
  const double hb = spec.H_bar();
  const std::optional<double> warm = std::isfinite(hb) ? std::optional<double>(alpha * hb) : std::nullopt;
  const ThetaSearch ts = theta_sup(G, opt, warm);
  BoundValue out;
  out.diagnostics.theta_star = ts.theta;
  out.diagnostics.inner_value = ts.value;
  out.diagnostics.evaluations = ts.evaluations;
  if (ts.at_edge) out.diagnostics.note = "theta-search optimum at the edge of the probed range";
  out.value = normalise(ts.value, spec, alpha);
  return out;
}

BoundReport renewal_bounds(const RenewalSpec& spec, double alpha, const BoundOptions& opt) {
  BoundReport rep;
  rep.alpha = alpha;
  rep.rough = rough_bound(spec, alpha);
  try {
    rep.g1 = g1_bound(spec, alpha, opt);
  } catch (const std::exception& e) {
    rep.g1_status = std::string("failed: ") + e.what();
  }
  try {
    rep.g2 = g2_bound(spec, alpha, opt);
  } catch (const HypothesisError& e) {
    rep.g2_status = std::string("refused: ") + e.what();
  }
  try {
    rep.g3 = g3_bound(spec, alpha, opt);
  } catch (const HypothesisError& e) {
    rep.g3_status = std::string("refused: ") + e.what();
  }
  if (auto r = spec.exponential_rate()) {
    rep.closed_form = exponential_rdr(*r, alpha) + spec.mark_moment(alpha) / (alpha * (alpha - 1.0));
  } else if (auto kr = spec.gamma_parameters(); kr && kr->first >= 1.0 && kr->second > 1.0) {
    rep.closed_form = gamma_closed_form(kr->first, kr->second, alpha) + spec.mark_moment(alpha) / (alpha * (alpha - 1.0));
  } else if (auto cs = spec.phase_type_envelope(); cs && cs->second > 1.0 && cs->first >= cs->second) {
    rep.closed_form = phase_type_envelope_bound(cs->first, cs->second, alpha) + spec.mark_moment(alpha) / (alpha * (alpha - 1.0));
  }
  return rep;
}

}  // namespace robustq
