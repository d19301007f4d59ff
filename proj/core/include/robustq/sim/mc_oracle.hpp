#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "robustq/divergence.hpp"
#include "robustq/sim/point_process.hpp"
#include "robustq/sim/reneging_sim.hpp"

namespace robustq::sim {

struct McEstimate {
  double point = 0.0;
  double std_err = 0.0;
  int replications = 0;
  std::uint64_t seed = 0;
  bool finite = true;
  std::string method;
};

enum class McMethod {
  // Sample under the alpha-tilted intensity lambda0^{1-alpha} lambda^alpha, which makes
  // Lambda^alpha dP/dP~ a function of the path that has low variance.
  tilted,
  // Sample under the Poisson reference and average Lambda^alpha directly.
  naive,
};

struct McOptions {
  McMethod method = McMethod::tilted;
  unsigned threads = 1;
};

// log dQ/dP on [0, horizon] for jump times `jumps` (P is Poisson(ref_rate)).
// Renewal laws use the hazard at the backward recurrence time; -inf when Q excludes the path.
double log_likelihood_ratio(const PrimitiveProcessSpec& q, double ref_rate, const std::vector<double>& jumps,
                            double horizon);

// Estimate of (1/(alpha(alpha-1) T)) log E_P[Lambda_T^alpha], or (1/T) E_Q[log Lambda_T] at alpha = 1.
McEstimate mc_renyi_rate(const PrimitiveProcessSpec& q, double ref_rate, RenyiOrder order, double horizon, int reps,
                         std::uint64_t seed, const McOptions& opt = {});

struct TailEstimate {
  McEstimate estimate;  // (1/(t n)) log of the hit frequency
  double threshold = 0.0;
  long hits = 0;
  double p_hat = 0.0;
  double p_lo = 0.0;  // 95% Wilson interval
  double p_hi = 0.0;
  bool unestimable = false;
};

// Naive Monte Carlo for P(R^n(t) / (t n) > threshold); replication r uses stream (seed, r).
TailEstimate mc_tail_probability(const RenegingConfig& cfg, double threshold, int reps, std::uint64_t seed,
                                 unsigned threads = 1);

}  // namespace robustq::sim
