#include "robustq/convex_opt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "robustq/sim/rng.hpp"

namespace robustq {

namespace {

constexpr double kGoldenFraction = 0.3819660112501051;  // 2 - phi
constexpr int kMaxExpansions = 200;
constexpr int kMaxGoldenIterations = 400;

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

struct Probe {
  double t;
  double f;
};

class TransformedObjective {
 public:
  explicit TransformedObjective(const ScalarObjective& obj) : obj_(obj) {}

  double operator()(double t) {
    ++evaluations_;
    const double x = from_search_coordinate(obj_.domain, t);
    if (!std::isfinite(t) || !(x > obj_.domain.lo) || !(x < obj_.domain.hi)) {
      return kInf;
    }
    double v = obj_.eval(x);
    if (std::isnan(v)) v = kInf;
    if (v < best_.f || (v == best_.f && x < from_search_coordinate(obj_.domain, best_.t))) {
      best_ = {t, v};
    }
    return v;
  }

  bool inside(double t) const {
    const double x = from_search_coordinate(obj_.domain, t);
    return std::isfinite(t) && x > obj_.domain.lo && x < obj_.domain.hi;
  }

  const Probe& best() const { return best_; }
  int evaluations() const { return evaluations_; }
  double x(double t) const { return from_search_coordinate(obj_.domain, t); }

 private:
  const ScalarObjective& obj_;
  Probe best_{0.0, kInf};
  int evaluations_ = 0;
};

OptResult finish(const TransformedObjective& g, double lo_t, double hi_t, bool converged,
                 BoundaryHit boundary, const Interval& domain) {
  OptResult r;
  r.arg = g.x(g.best().t);
  r.value = g.best().f;
  r.iterations = g.evaluations();
  r.bracket_lo = g.inside(lo_t) ? g.x(lo_t) : domain.lo;
  r.bracket_hi = g.inside(hi_t) ? g.x(hi_t) : domain.hi;
  r.converged = converged;
  r.boundary = boundary;
  return r;
}

}  // namespace

double to_search_coordinate(const Interval& d, double x) {
  const bool lo_finite = std::isfinite(d.lo);
  const bool hi_finite = std::isfinite(d.hi);
  if (!lo_finite && !hi_finite) return x;
  if (lo_finite && !hi_finite) return std::log(x - d.lo);
  if (!lo_finite) return -std::log(d.hi - x);
  const double u = (x - d.lo) / (d.hi - d.lo);
  return std::log(u) - std::log1p(-u);
}

double from_search_coordinate(const Interval& d, double t) {
  const bool lo_finite = std::isfinite(d.lo);
  const bool hi_finite = std::isfinite(d.hi);
  if (!lo_finite && !hi_finite) return t;
  if (lo_finite && !hi_finite) return d.lo + std::exp(t);
  if (!lo_finite) return d.hi - std::exp(-t);
  return d.lo + (d.hi - d.lo) * sigmoid(t);
}

OptResult minimize_1d(const ScalarObjective& obj, double tol) {
  if (!obj.eval) throw std::invalid_argument("minimize_1d: objective has no eval");
  if (!(obj.domain.lo < obj.domain.hi)) throw std::invalid_argument("minimize_1d: empty domain");
  TransformedObjective g(obj);

  double a = obj.seed ? to_search_coordinate(obj.domain, *obj.seed) : 0.0;
  if (!g.inside(a)) a = 0.0;
  double fa = g(a);

  if (!(fa < kInf)) {
    // Look outward for a finite starting point.
    bool found = false;
    for (double step = 0.25; step <= 1024.0 && !found; step *= 2.0) {
      for (double sgn : {1.0, -1.0}) {
        const double t = a + sgn * step;
        const double ft = g(t);
        if (ft < kInf) {
          a = t;
          fa = ft;
          found = true;
          break;
        }
      }
    }
    if (!found) {
      for (double t = -60.0; t <= 60.0 && !found; t += 0.125) {
        const double ft = g(t);
        if (ft < kInf) {
          a = t;
          fa = ft;
          found = true;
        }
      }
    }
    if (!found) throw std::domain_error("minimize_1d: objective is not finite anywhere on its domain");
  }
  if (fa == -kInf) return finish(g, a, a, false, BoundaryHit::none, obj.domain);

  // Bracket: (a, b, c) in the search coordinate with f(b) <= f(a), f(c).
  double h = 1.0;
  double b = a + h;
  double fb = g(b);
  double c = 0.0;
  double fc = 0.0;
  if (fb > fa) {
    c = a - h;
    fc = g(c);
    if (fc >= fa) {
      // Seed is interior: bracket (a - h, a, a + h).
      const double mid = a;
      const double fmid = fa;
      a = c;
      fa = fc;
      c = b;
      fc = fb;
      b = mid;
      fb = fmid;
      goto golden;
    }
    b = c;
    fb = fc;
    h = -h;
  }
  {
    int expansions = 0;
    for (;;) {
      h *= 2.0;
      c = b + h;
      if (!g.inside(c) || expansions >= kMaxExpansions) {
        const BoundaryHit hit = h > 0 ? BoundaryHit::upper : BoundaryHit::lower;
        return finish(g, std::min(a, b), std::max(a, b), false, hit, obj.domain);
      }
      fc = g(c);
      ++expansions;
      if (fc > fb) break;
      a = b;
      fa = fb;
      b = c;
      fb = fc;
    }
    if (a > c) {
      std::swap(a, c);
      std::swap(fa, fc);
    }
  }

golden:
  for (int it = 0; it < kMaxGoldenIterations; ++it) {
    if (c - a <= tol * std::max(1.0, std::abs(b))) break;
    const bool right = (c - b) > (b - a);
    const double x = right ? b + kGoldenFraction * (c - b) : b - kGoldenFraction * (b - a);
    const double fx = g(x);
    if (fx < fb) {
      if (right) {
        a = b;
        fa = fb;
      } else {
        c = b;
        fc = fb;
      }
      b = x;
      fb = fx;
    } else {
      if (right) {
        c = x;
        fc = fx;
      } else {
        a = x;
        fa = fx;
      }
    }
  }

  // Three-point probe around the reported minimiser.
  const double delta = std::max(tol, 1e-12) * std::max(1.0, std::abs(b));
  const double fl = g(b - delta);
  const double fr = g(b + delta);
  const double slack = 1e-12 * std::max(1.0, std::abs(fb));
  const bool converged = (c - a <= 10.0 * tol * std::max(1.0, std::abs(b))) &&
                         fb <= fl + slack && fb <= fr + slack;
  return finish(g, a, c, converged, BoundaryHit::none, obj.domain);
}

OptResult maximize_1d(const ScalarObjective& obj, double tol) {
  ScalarObjective neg = obj;
  neg.eval = [&obj](double x) { return -obj.eval(x); };
  if (obj.convexity == Convexity::concave) neg.convexity = Convexity::convex;
  if (obj.convexity == Convexity::convex) neg.convexity = Convexity::concave;
  OptResult r = minimize_1d(neg, tol);
  r.value = -r.value;
  return r;
}

namespace {

constexpr double kUnboundedArgument = 1e12;

struct AscentState {
  std::array<double, 2> lambda;
  double value;
  int sweeps;
};

class ConjugateObjective {
 public:
  ConjugateObjective(const Function2d& f, std::array<double, 2> x) : f_(f), x_(x) {}
  double operator()(const std::array<double, 2>& l) const {
    const double fv = f_(l[0], l[1]);
    if (std::isnan(fv) || fv == kInf) return -kInf;
    return l[0] * x_[0] + l[1] * x_[1] - fv;
  }

 private:
  const Function2d& f_;
  std::array<double, 2> x_;
};

// Maximises J along lambda + tau * d; returns false when J grows without bound.
bool line_search(const ConjugateObjective& J, std::array<double, 2>& lambda, double& value,
                 std::array<double, 2> d, double tol) {
  ScalarObjective obj;
  obj.eval = [&](double tau) { return J({lambda[0] + tau * d[0], lambda[1] + tau * d[1]}); };
  obj.convexity = Convexity::concave;
  obj.seed = 0.0;
  OptResult r;
  try {
    r = maximize_1d(obj, tol);
  } catch (const std::domain_error&) {
    return true;
  }
  if (r.boundary != BoundaryHit::none && std::isfinite(r.value)) {
    const double half = obj.eval(0.5 * r.arg);
    if (r.value - half > 1.0) return false;
  }
  if (r.value > value) {
    lambda = {lambda[0] + r.arg * d[0], lambda[1] + r.arg * d[1]};
    value = r.value;
  }
  if (r.value == kInf) return false;
  return true;
}

std::optional<AscentState> coordinate_ascent(const ConjugateObjective& J, std::array<double, 2> start,
                                             const ConjugateOptions& opt) {
  AscentState s{start, J(start), 0};
  if (!(s.value > -kInf)) return std::nullopt;
  for (; s.sweeps < opt.max_sweeps; ++s.sweeps) {
    const auto before = s.lambda;
    const double before_value = s.value;
    for (int i = 0; i < 2; ++i) {
      std::array<double, 2> axis{0.0, 0.0};
      axis[i] = 1.0;
      if (!line_search(J, s.lambda, s.value, axis, opt.tol)) {
        s.value = kInf;
        return s;
      }
    }
    const std::array<double, 2> d{s.lambda[0] - before[0], s.lambda[1] - before[1]};
    if (d[0] != 0.0 || d[1] != 0.0) {
      if (!line_search(J, s.lambda, s.value, d, opt.tol)) {
        s.value = kInf;
        return s;
      }
    }
    if (std::hypot(s.lambda[0], s.lambda[1]) > kUnboundedArgument) {
      s.value = kInf;
      return s;
    }
    if (s.value - before_value <= opt.tol * (1.0 + std::abs(s.value))) break;
  }
  return s;
}

bool better(const AscentState& a, const AscentState& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.lambda < b.lambda;
}

}  // namespace

ConjugateResult fenchel_conjugate_2d(const Function2d& f, std::array<double, 2> x,
                                     const ConjugateOptions& opt) {
  const ConjugateObjective J(f, x);
  std::vector<std::array<double, 2>> starts;
  if (opt.warm_start) {
    starts.push_back(*opt.warm_start);
  } else {
    const int n = std::max(1, opt.grid_starts_per_axis);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double u = n == 1 ? 0.0 : -1.0 + 2.0 * i / (n - 1);
        const double v = n == 1 ? 0.0 : -1.0 + 2.0 * j / (n - 1);
        starts.push_back({u * opt.start_spread, v * opt.start_spread});
      }
    }
  }

  std::optional<AscentState> best;
  auto consider = [&](const std::optional<AscentState>& s) {
    if (s && (!best || better(*s, *best))) best = s;
  };
  for (const auto& s0 : starts) {
    consider(coordinate_ascent(J, s0, opt));
    if (best && best->value == kInf) break;
  }
  if (!best) {
    // No start point in the effective domain of f: try the origin explicitly.
    consider(coordinate_ascent(J, {0.0, 0.0}, opt));
    if (!best) throw std::domain_error("fenchel_conjugate_2d: f is +inf at every start point");
  }

  ConjugateResult out;
  if (best->value < kInf && opt.fenchel_young_probes > 0) {
    sim::CounterRng rng(opt.probe_seed, 0x46594f554e47ULL);
    for (int k = 0; k < opt.fenchel_young_probes; ++k) {
      const std::array<double, 2> l{best->lambda[0] + opt.probe_radius * (2.0 * rng.uniform() - 1.0),
                                    best->lambda[1] + opt.probe_radius * (2.0 * rng.uniform() - 1.0)};
      const double jl = J(l);
      const double excess = jl - best->value;
      if (excess > opt.tol * (1.0 + std::abs(best->value))) {
        out.fenchel_young_excess = std::max(out.fenchel_young_excess, excess);
        consider(coordinate_ascent(J, l, opt));
        if (best->value == kInf) break;
      }
    }
  }
  out.value = best->value;
  out.maximizer = best->lambda;
  out.sweeps = best->sweeps;
  return out;
}

}  // namespace robustq
