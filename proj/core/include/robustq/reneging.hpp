#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "robustq/divergence.hpp"
#include "robustq/families.hpp"

namespace robustq {

// Rates are per unit of n: arrivals at lambda n, n servers of rate mu.
struct RenegingInstance {
  double lambda = 2.0;
  double mu = 1.0;
  double theta = 1.0;
  double gamma = 1.0;

  double gamma0() const { return lambda - mu; }
  void validate() const;
};

// Gamma(k, rho) service laws with (k, rho) ranging over a rectangle.
struct GammaBox {
  double k_lo = 1.0, k_hi = 1.0;
  double rho_lo = 1.0, rho_hi = 1.0;
  void validate() const;
};

// Per-point value of a Gamma box: the RDR bound, or the bare bracket (alpha (alpha - 1) times larger).
enum class GammaConvention { rdr, paper_bracket };

using ServiceFamily = std::variant<UncertaintyFamily, GammaBox>;

struct CompositeFamily {
  Envelope arrival{1.0, 1.0};
  Envelope patience{1.0, 1.0};
  ServiceFamily service = UncertaintyFamily{FamilyQ2{1.0, 1.0}};
  // Drop the arrival/patience divergence (service-only uncertainty).
  bool service_only = false;
  GammaConvention convention = GammaConvention::rdr;
};

double z_of_gamma(const RenegingInstance& inst);
double reference_decay(const RenegingInstance& inst);

// Supremum of the Gamma closed form over the box, by grid scan plus local refinement.
double gamma_box_r2(const GammaBox& box, double alpha, GammaConvention convention = GammaConvention::rdr);

AlphaCurve reneging_rdr_curve(const RenegingInstance& inst, const CompositeFamily& fam);

struct RenegingBound {
  double bound = 0.0;
  double alpha_star = 0.0;
  bool at_boundary = false;
};

RenegingBound robust_reneging_bound(const RenegingInstance& inst, const CompositeFamily& fam);

struct Figure3Column {
  std::string name;  // used as bound_<name> / alpha_star_<name>
  CompositeFamily family;
};

struct Figure3Row {
  double gamma = 0.0;
  double ref_decay = 0.0;
  std::vector<double> bounds;
  std::vector<double> alpha_stars;
};

// gamma grid of `points` values on [gamma0, gamma0 + span].
std::vector<double> default_gamma_grid(const RenegingInstance& inst, int points = 60, double span = 3.0);

std::vector<Figure3Row> figure3_data(const RenegingInstance& inst, const std::vector<Figure3Column>& columns,
                                     const std::vector<double>& gamma_grid, unsigned threads = 1);

// The standard column set: Q2, Q3, primed variants and two Gamma boxes (plus their primes).
std::vector<Figure3Column> standard_figure3_columns(double delta, GammaBox small_box, GammaBox large_box,
                                                    GammaConvention convention = GammaConvention::rdr);

}  // namespace robustq
