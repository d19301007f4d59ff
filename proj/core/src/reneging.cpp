#include "robustq/reneging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "robustq/parallel.hpp"

namespace robustq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Gamma closed form without the rho > 1 precondition, so box edges at rho = 1 are allowed.
double gamma_point(double k, double rho, double alpha, GammaConvention convention) {
  const double m = 1.0 + alpha * (k - 1.0);
  const double log_a = std::lgamma(m) - alpha * std::lgamma(k) + alpha * k * std::log(rho);
  const double bracket = std::exp(log_a / m) - alpha * (rho - 1.0) - 1.0;
  return convention == GammaConvention::rdr ? bracket / (alpha * (alpha - 1.0)) : bracket;
}

}  // namespace

void RenegingInstance::validate() const {
  if (!(mu > 0.0) || !(lambda >= mu) || !std::isfinite(lambda)) {
    throw std::invalid_argument("reneging instance needs lambda >= mu > 0");
  }
  if (!(theta > 0.0)) throw std::invalid_argument("reneging instance needs theta > 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("reneging instance needs gamma >= 0");
}

void GammaBox::validate() const {
  if (!(k_lo >= 1.0 && k_hi >= k_lo && std::isfinite(k_hi))) throw std::invalid_argument("GammaBox: need 1 <= k_lo <= k_hi");
  if (!(rho_lo >= 1.0 && rho_hi >= rho_lo && std::isfinite(rho_hi))) {
    throw std::invalid_argument("GammaBox: need 1 <= rho_lo <= rho_hi");
  }
}

double z_of_gamma(const RenegingInstance& inst) {
  inst.validate();
  const double g = inst.gamma;
  return (std::sqrt(g * g + 4.0 * inst.mu * inst.lambda) - g) / (2.0 * inst.mu);
}

double reference_decay(const RenegingInstance& inst) {
  if (inst.gamma < inst.gamma0() - 1e-12) throw std::domain_error("reference_decay: gamma below the LLN rate gamma0");
  const double z = z_of_gamma(inst);
  return inst.lambda * (1.0 - 1.0 / z) + inst.mu * (1.0 - z) - inst.gamma * std::log(z);
}

double gamma_box_r2(const GammaBox& box, double alpha, GammaConvention convention) {
  box.validate();
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw std::domain_error("gamma_box_r2: alpha must be > 1");
  // The closed form is convex in rho for every k, so the rho-supremum sits at an edge.
  auto edge_max = [&](double k) {
    return std::max(gamma_point(k, box.rho_lo, alpha, convention), gamma_point(k, box.rho_hi, alpha, convention));
  };
  if (box.k_hi == box.k_lo) return edge_max(box.k_lo);
  constexpr int kScan = 101;
  double best = -kInf;
  int jbest = 0;
  for (int j = 0; j < kScan; ++j) {
    const double k = box.k_lo + (box.k_hi - box.k_lo) * j / (kScan - 1);
    const double v = edge_max(k);
    if (v > best) {
      best = v;
      jbest = j;
    }
  }
  if (jbest > 0 && jbest + 1 < kScan) {
    const double h = (box.k_hi - box.k_lo) / (kScan - 1);
    const double k0 = box.k_lo + h * jbest;
    ScalarObjective obj;
    obj.domain = {k0 - h, k0 + h};
    obj.eval = edge_max;
    obj.seed = k0;
    best = std::max(best, maximize_1d(obj, 1e-12).value);
  }
  return std::max(best, 0.0);
}

AlphaCurve reneging_rdr_curve(const RenegingInstance& inst, const CompositeFamily& fam) {
  inst.validate();
  std::vector<AlphaCurve> parts;
  if (!fam.service_only) {
    const double a_hat = fam.arrival.a * fam.patience.a;
    const double b_hat = fam.arrival.b * fam.patience.b;
    const UncertaintyFamily arrivals = FamilyQ2{a_hat, b_hat};
    parts.push_back(family_curve(arrivals, PoissonReference{inst.lambda, std::nullopt}));
  }
  std::visit(overloaded{
                 [&](const UncertaintyFamily& f) { parts.push_back(family_curve(f, PoissonReference{inst.mu, std::nullopt})); },
                 [&](const GammaBox& box) {
                   box.validate();
                   // Service RDR scales with the server rate mu (time rescaling).
                   const double mu = inst.mu;
                   const GammaConvention conv = fam.convention;
                   parts.push_back(AlphaCurve([box, mu, conv](double a) { return mu * gamma_box_r2(box, a, conv); }));
                 },
             },
             fam.service);
  return AlphaCurve::sum(parts);
}

RenegingBound robust_reneging_bound(const RenegingInstance& inst, const CompositeFamily& fam) {
  RrbInputs in;
  in.ref_log_prob = -reference_decay(inst);
  in.rdr_curve = reneging_rdr_curve(inst, fam);
  const RrbOptimum opt = rrb_optimize(in);
  return {opt.bound, opt.alpha_star, opt.at_boundary};
}

std::vector<double> default_gamma_grid(const RenegingInstance& inst, int points, double span) {
  if (points < 2) throw std::invalid_argument("gamma grid needs at least 2 points");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = inst.gamma0() + span * i / (points - 1);
  return g;
}

std::vector<Figure3Row> figure3_data(const RenegingInstance& inst, const std::vector<Figure3Column>& columns,
                                     const std::vector<double>& gamma_grid, unsigned threads) {
  std::vector<Figure3Row> rows(gamma_grid.size());
  parallel_for(gamma_grid.size(), threads, [&](std::size_t i) {
    RenegingInstance at = inst;
    at.gamma = gamma_grid[i];
    Figure3Row row;
    row.gamma = at.gamma;
    row.ref_decay = -reference_decay(at);
    for (const auto& col : columns) {
      const RenegingBound b = robust_reneging_bound(at, col.family);
      row.bounds.push_back(b.bound);
      row.alpha_stars.push_back(b.alpha_star);
    }
    rows[i] = std::move(row);
  });
  return rows;
}

std::vector<Figure3Column> standard_figure3_columns(double delta, GammaBox small_box, GammaBox large_box,
                                                    GammaConvention convention) {
  const Envelope env{1.0 - delta, 1.0 + delta};
  auto make = [&](std::string name, ServiceFamily service, bool prime) {
    CompositeFamily f;
    f.arrival = env;
    f.service = std::move(service);
    f.service_only = prime;
    f.convention = convention;
    return Figure3Column{std::move(name), std::move(f)};
  };
  return {
      make("Q2", UncertaintyFamily{FamilyQ2{env.a, env.b}}, false),
      make("Q3", UncertaintyFamily{FamilyQ3{env.a, env.b}}, false),
      make("Q2prime", UncertaintyFamily{FamilyQ2{env.a, env.b}}, true),
      make("Q3prime", UncertaintyFamily{FamilyQ3{env.a, env.b}}, true),
      make("gammabox_small", small_box, false),
      make("gammabox_large", large_box, false),
      make("gammabox_smallprime", small_box, true),
      make("gammabox_largeprime", large_box, true),
  };
}

}  // namespace robustq
