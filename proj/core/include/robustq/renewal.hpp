#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "robustq/convex_opt.hpp"
#include "robustq/families.hpp"

namespace robustq {

namespace sim {
class CounterRng;
}

// Thrown when a bound's hypotheses fail for the given density.
class HypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inter-jump law of a (possibly marked) renewal process.
class RenewalSpec {
 public:
  struct Model;

  static RenewalSpec exponential(double rate);
  static RenewalSpec gamma(double shape, double rate);
  // Mixture of exponentials sum_i w_i rate_i e^{-rate_i x}; envelope C = sum w_i rate_i, sigma = min rate_i.
  static RenewalSpec phase_type(std::vector<double> weights, std::vector<double> rates);
  // Piecewise-linear density through (x_i, g_i), zero outside [x_0, x_last].
  static RenewalSpec tabulated(std::vector<double> x, std::vector<double> g);
  // Two-column CSV (x, g), optional header line.
  static RenewalSpec from_csv(const std::filesystem::path& path);
  // User-supplied law; the sampler draws one inter-jump time from a uniform(0,1) source.
  static RenewalSpec custom(std::string name, std::function<double(double)> log_density,
                            std::function<double(double)> survival,
                            std::function<double(const std::function<double()>&)> sampler);

  RenewalSpec with_mark(MarkSpec mark) const;

  const std::string& family() const;
  double density(double x) const;
  double log_density(double x) const;
  double survival(double x) const;
  // -log survival(x), accurate where survival underflows.
  double cumulative_hazard(double x) const;
  double hazard(double x) const;
  // H(x) = x + log g(x).
  double H(double x) const;
  double H_bar() const;
  // True when g > 0 on all of (0, inf).
  bool full_support() const;
  double mean() const;

  double sample(sim::CounterRng& rng) const;
  // sup of the hazard rate when known in closed form.
  std::optional<double> hazard_bound() const;

  const std::optional<MarkSpec>& mark() const { return mark_; }
  double mark_moment(double alpha) const { return mark_ ? mark_->c(alpha) : 0.0; }

  // Parameters of the parametric families, when applicable.
  std::optional<double> exponential_rate() const;
  std::optional<std::pair<double, double>> gamma_parameters() const;
  std::optional<std::pair<double, double>> phase_type_envelope() const;

 private:
  explicit RenewalSpec(std::shared_ptr<const Model> m) : model_(std::move(m)) {}
  std::shared_ptr<const Model> model_;
  std::optional<MarkSpec> mark_;
};

// beta(l1, l2) = log of the integral of exp(l1 y + l2 H(y)) against the unit exponential.
class ExponentialTilt {
 public:
  explicit ExponentialTilt(RenewalSpec spec);

  double beta(double l1, double l2) const;
  double log_gamma(double s) const { return beta(0.0, s); }
  double gamma(double s) const { return std::exp(log_gamma(s)); }
  // Finite at the four points (+-eps, +-eps).
  bool finite_near_origin(double eps = 1e-3) const;
  const RenewalSpec& spec() const { return spec_; }

 private:
  RenewalSpec spec_;
};

struct BoundOptions {
  // Evaluate the gated bounds even when their hypotheses fail.
  bool override_hypotheses = false;
  double log_theta_lo = -10.0;
  double log_theta_hi = 10.0;
  int theta_scan_points = 41;
  double tol = 1e-8;
};

struct BoundDiagnostics {
  double theta_star = 0.0;
  double inner_value = 0.0;   // unnormalised sup_theta G(theta)
  double shortcut_gap = 0.0;  // max over checked theta of (nested - shortcut), should be <= 0
  int evaluations = 0;
  std::string note;
};

struct BoundValue {
  double value = kInf;
  BoundDiagnostics diagnostics{};
};

double rough_bound(const RenewalSpec& spec, double alpha);
BoundValue g1_bound(const RenewalSpec& spec, double alpha, const BoundOptions& opt = {});
BoundValue g2_bound(const RenewalSpec& spec, double alpha, const BoundOptions& opt = {});
BoundValue g3_bound(const RenewalSpec& spec, double alpha, const BoundOptions& opt = {});

// Legendre-Fenchel conjugate of beta at x.
double legendre_transform(const ExponentialTilt& tilt, std::array<double, 2> x, const ConjugateOptions& opt = {});

// G3 inner term theta * sup_{x2} [alpha x2 - beta*(1/theta, x2)] by nested searches.
double g3_primal_inner(const ExponentialTilt& tilt, double alpha, double theta);
// The same quantity via the dual form theta * inf_{l1} [beta(l1, alpha) - l1 / theta].
double g3_dual_inner(const ExponentialTilt& tilt, double alpha, double theta);
// G2 inner term by the nested partial-conjugate form, and the single-variable upper bound.
double g2_nested_inner(const ExponentialTilt& tilt, double alpha, double theta);
double g2_shortcut_inner(const ExponentialTilt& tilt, double alpha, double theta);

struct BoundReport {
  double alpha = 0.0;
  double rough = kInf;
  std::optional<BoundValue> g1;
  std::optional<BoundValue> g2;
  std::optional<BoundValue> g3;
  std::string g1_status = "ok";
  std::string g2_status = "ok";
  std::string g3_status = "ok";
  std::optional<double> closed_form;  // exponential/gamma/phase-type envelope when applicable
};

BoundReport renewal_bounds(const RenewalSpec& spec, double alpha, const BoundOptions& opt = {});

// (rho^alpha - 1 - alpha (rho - 1)) / (alpha (alpha - 1)).
double exponential_rdr(double rho, double alpha);
double gamma_closed_form(double k, double rho, double alpha);
double phase_type_envelope_bound(double C, double sigma, double alpha);

}  // namespace robustq
