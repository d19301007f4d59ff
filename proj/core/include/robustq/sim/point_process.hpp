#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "robustq/renewal.hpp"
#include "robustq/sim/rng.hpp"

namespace robustq::sim {

struct PoissonProcess {
  double rate = 1.0;
};

struct RenewalProcess {
  RenewalSpec law;
};

// Deterministic piecewise-constant intensity: levels[i] on [breaks[i], breaks[i+1]),
// breaks[0] = 0, repeated with the given period when period > 0 (else the last level persists).
struct CoxPiecewise {
  std::vector<double> breaks;
  std::vector<double> levels;
  double period = 0.0;
  double lower = 0.0;  // declared envelope a lambda0
  double upper = 0.0;  // declared envelope b lambda0

  void validate() const;
  double intensity(double t) const;
  // Integral of f(intensity) over [0, t] for a function of the level.
  template <class F>
  double integrate(double t, F&& f) const;
  double max_level() const;
  // Alternates a lambda0 then b lambda0 within each period, with fractions p = (b-1)/(b-a), q = 1-p
  // so that the long-run mean intensity is lambda0.
  static CoxPiecewise two_level(double lambda0, double a, double b, double period = 1.0);
};

// Points offset, offset + period, offset + 2 period, ...
struct LatticeProcess {
  double period = 1.0;
  double offset = 1.0;
};

// Explicit strictly increasing jump times.
struct FixedPoints {
  std::vector<double> times;
};

using PrimitiveProcessSpec = std::variant<PoissonProcess, RenewalProcess, CoxPiecewise, LatticeProcess, FixedPoints>;

void validate(const PrimitiveProcessSpec& spec);

// Lazily generated jump times of one process path.
class PointStream {
 public:
  PointStream(const PrimitiveProcessSpec& spec, CounterRng rng);
  // Next jump time (+inf once a finite list is exhausted).
  double next();

 private:
  PrimitiveProcessSpec spec_;
  CounterRng rng_;
  double last_ = 0.0;
  std::size_t index_ = 0;
};

std::vector<double> sample_path(const PrimitiveProcessSpec& spec, double horizon, CounterRng& rng);
std::vector<double> sample_renewal_path(const RenewalSpec& spec, double horizon, CounterRng& rng);
std::vector<double> sample_cox_path(const CoxPiecewise& spec, double horizon, CounterRng& rng);

template <class F>
double CoxPiecewise::integrate(double t, F&& f) const {
  double total = 0.0;
  double cycle_start = 0.0;
  const double span = period > 0.0 ? period : t;
  while (cycle_start < t) {
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const double a = cycle_start + breaks[i];
      double b = i + 1 < levels.size() ? cycle_start + breaks[i + 1] : (period > 0.0 ? cycle_start + period : t);
      if (a >= t) break;
      b = b < t ? b : t;
      total += (b - a) * f(levels[i]);
    }
    if (!(period > 0.0)) break;
    cycle_start += span;
  }
  return total;
}

}  // namespace robustq::sim
