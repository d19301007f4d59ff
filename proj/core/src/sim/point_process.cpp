#include "robustq/sim/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace robustq::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void CoxPiecewise::validate() const {
  if (levels.empty() || breaks.size() != levels.size()) throw std::invalid_argument("Cox path needs one break per level");
  if (breaks.front() != 0.0) throw std::invalid_argument("Cox path: first break must be 0");
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) throw std::invalid_argument("Cox path: breaks must increase strictly");
  }
  if (period < 0.0 || (period > 0.0 && !(breaks.back() < period))) {
    throw std::invalid_argument("Cox path: breaks must lie inside the period");
  }
  if (!(lower >= 0.0 && upper >= lower && std::isfinite(upper))) throw std::invalid_argument("Cox path: bad declared bounds");
  for (double l : levels) {
    if (!(l >= lower && l <= upper)) throw std::invalid_argument("Cox intensity leaves its declared bounds");
  }
}

double CoxPiecewise::intensity(double t) const {
  if (period > 0.0) t = std::fmod(t, period);
  const auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
  const std::size_t i = it == breaks.begin() ? 0 : static_cast<std::size_t>(it - breaks.begin()) - 1;
  return levels[i];
}

double CoxPiecewise::max_level() const { return *std::max_element(levels.begin(), levels.end()); }

CoxPiecewise CoxPiecewise::two_level(double lambda0, double a, double b, double period) {
  if (!(lambda0 > 0.0 && a >= 0.0 && a < 1.0 && b > 1.0 && period > 0.0)) {
    throw std::invalid_argument("two_level: need lambda0 > 0, 0 <= a < 1 < b, period > 0");
  }
  const double p = (b - 1.0) / (b - a);
  CoxPiecewise c;
  c.breaks = {0.0, p * period};
  c.levels = {a * lambda0, b * lambda0};
  c.period = period;
  c.lower = a * lambda0;
  c.upper = b * lambda0;
  return c;
}

void validate(const PrimitiveProcessSpec& spec) {
  std::visit(overloaded{
                 [](const PoissonProcess& p) {
                   if (!(p.rate >= 0.0 && std::isfinite(p.rate))) throw std::invalid_argument("Poisson rate must be >= 0");
                 },
                 [](const RenewalProcess&) {},
                 [](const CoxPiecewise& c) { c.validate(); },
                 [](const LatticeProcess& l) {
                   if (!(l.period > 0.0 && l.offset > 0.0)) throw std::invalid_argument("lattice period and offset must be > 0");
                 },
                 [](const FixedPoints& f) {
                   for (std::size_t i = 0; i < f.times.size(); ++i) {
                     if (!(f.times[i] > (i == 0 ? 0.0 : f.times[i - 1]))) {
                       throw std::invalid_argument("fixed jump times must be positive and strictly increasing");
                     }
                   }
                 },
             },
             spec);
}

PointStream::PointStream(const PrimitiveProcessSpec& spec, CounterRng rng) : spec_(spec), rng_(rng) {}

double PointStream::next() {
  const double t = std::visit(
      overloaded{
          [&](const PoissonProcess& p) { return p.rate > 0.0 ? last_ + rng_.exponential(p.rate) : kInf; },
          [&](const RenewalProcess& r) { return last_ + r.law.sample(rng_); },
          [&](const CoxPiecewise& c) {
            const double m = c.upper;
            if (!(m > 0.0)) return kInf;
            double s = last_;
            for (;;) {
              s += rng_.exponential(m);
              if (rng_.uniform() * m < c.intensity(s)) return s;
              // A non-periodic path whose final level is 0 never jumps again.
              if (c.period == 0.0 && s >= c.breaks.back() && c.levels.back() == 0.0) return kInf;
            }
          },
          [&](const LatticeProcess& l) { return l.offset + static_cast<double>(index_) * l.period; },
          [&](const FixedPoints& f) { return index_ < f.times.size() ? f.times[index_] : kInf; },
      },
      spec_);
  ++index_;
  last_ = t;
  return t;
}

std::vector<double> sample_path(const PrimitiveProcessSpec& spec, double horizon, CounterRng& rng) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("sample_path: horizon must be >= 0");
  validate(spec);
  std::vector<double> out;
  if (horizon == 0.0) return out;
  PointStream s(spec, rng);
  for (double t = s.next(); t <= horizon; t = s.next()) out.push_back(t);
  return out;
}

std::vector<double> sample_renewal_path(const RenewalSpec& spec, double horizon, CounterRng& rng) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("sample_renewal_path: horizon must be >= 0");
  std::vector<double> out;
  if (horizon == 0.0) return out;
  for (double t = spec.sample(rng); t <= horizon; t += spec.sample(rng)) out.push_back(t);
  return out;
}

std::vector<double> sample_cox_path(const CoxPiecewise& spec, double horizon, CounterRng& rng) {
  spec.validate();
  if (!(horizon >= 0.0)) throw std::invalid_argument("sample_cox_path: horizon must be >= 0");
  std::vector<double> out;
  const double m = spec.upper;
  if (horizon == 0.0 || !(m > 0.0)) return out;
  for (double s = rng.exponential(m); s <= horizon; s += rng.exponential(m)) {
    if (rng.uniform() * m < spec.intensity(s)) out.push_back(s);
  }
  return out;
}

}  // namespace robustq::sim
