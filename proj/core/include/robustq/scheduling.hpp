#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "robustq/convex_opt.hpp"
#include "robustq/divergence.hpp"
#include "robustq/families.hpp"

namespace robustq {

enum class EnvelopeFamily { q2, q3 };

struct SchedulingInstance {
  std::vector<double> arrival_rates;
  std::vector<double> service_rates;
  std::vector<double> costs;
  double beta = 1.0;
  double horizon = 1.0;
  std::vector<Envelope> arrival_envelopes;  // empty means (1, 1) for every class
  std::vector<Envelope> service_envelopes;
  EnvelopeFamily family = EnvelopeFamily::q2;

  std::size_t num_classes() const { return arrival_rates.size(); }
  void validate() const;
  double traffic_intensity() const;
  // Copy with every envelope set to (1 - delta, 1 + delta).
  SchedulingInstance with_symmetric_envelopes(double delta) const;
};

struct TiltedRates {
  std::vector<double> lambda_hat;
  std::vector<double> mu_hat;
};

TiltedRates tilted_rates(const SchedulingInstance& inst, double gamma);

struct WResult {
  double value = 0.0;
  std::vector<double> allocation;
};

// min over the sub-simplex of sum_i (lambda_hat_i - u_i mu_hat_i)^+, by the greedy fill.
WResult w_of_gamma(const SchedulingInstance& inst, double gamma);

double f0_of_alpha(const SchedulingInstance& inst, double alpha);

// f0(gamma / (gamma - beta)) / (gamma - beta) + W(gamma) / gamma, for gamma > beta.
double scheduling_objective(const SchedulingInstance& inst, double gamma);

struct RobustBoundResult {
  double bound = 0.0;
  double gamma_star = 0.0;
  bool at_boundary = false;
  std::vector<std::size_t> priority_order;
};

RobustBoundResult robust_rs_bound(const SchedulingInstance& inst, double tol = 1e-10);

// Classes sorted by mu_i (1 - e^{-gamma c_i}) descending, ties by ascending index.
std::vector<std::size_t> priority_index_order(const SchedulingInstance& inst, double gamma);

// Reference curve gamma^{-1} W(gamma) T evaluated at gamma = beta.
double reference_rs_value(const SchedulingInstance& inst);

// Solves ell(a) = ell(b) for a in [0, 1); returns 0 when ell(b) > 1.
double balanced_lower_envelope(double b);

// sup over the Q grid of the right-hand side minus the left-hand side of the
// Renyi duality bound for risk-sensitive costs.
double rs_duality_check(const FiniteDistribution& q, const FiniteDistribution& p, const std::vector<double>& g,
                        double beta, double gamma, int grid_points = 1000);

// Pairwise midpoint-convexity violations of m(theta) = theta log mean(X^{1/theta}).
std::size_t convexity_probe_m(const std::vector<double>& theta_grid, const std::vector<double>& samples,
                              double tol = 1e-7);

}  // namespace robustq
