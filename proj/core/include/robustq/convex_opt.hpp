#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>

namespace robustq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Convexity { convex, concave, unknown };

// Open interval; either end may be infinite.
struct Interval {
  double lo = -kInf;
  double hi = kInf;
};

struct ScalarObjective {
  std::function<double(double)> eval;
  Interval domain{};
  Convexity convexity = Convexity::unknown;
  // Interior starting point; defaults to the centre of the transformed coordinate.
  std::optional<double> seed{};
};

enum class BoundaryHit { none, lower, upper };

struct OptResult {
  double arg = 0.0;
  double value = kInf;
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool converged = false;
  BoundaryHit boundary = BoundaryHit::none;
};

// Golden-section search on a smooth bijection of the domain onto the real line.
// The returned value is the smallest value seen over every evaluation.
OptResult minimize_1d(const ScalarObjective& obj, double tol = 1e-8);
OptResult maximize_1d(const ScalarObjective& obj, double tol = 1e-8);

// Maps between a domain and the unbounded search coordinate.
double to_search_coordinate(const Interval& domain, double x);
double from_search_coordinate(const Interval& domain, double t);

using Function2d = std::function<double(double, double)>;

struct ConjugateOptions {
  int grid_starts_per_axis = 3;  // 3 x 3 = 9 starts
  double start_spread = 0.5;
  int max_sweeps = 100;
  double tol = 1e-10;
  int fenchel_young_probes = 20;
  double probe_radius = 1.0;
  std::uint64_t probe_seed = 0x5eedULL;
  std::optional<std::array<double, 2>> warm_start{};
};

struct ConjugateResult {
  double value = kInf;
  std::array<double, 2> maximizer{0.0, 0.0};
  int sweeps = 0;
  // Largest amount by which a probe point beat the reported supremum (0 when certified).
  double fenchel_young_excess = 0.0;
};

// sup over lambda of <lambda, x> - f(lambda), by multi-start coordinate ascent with
// pattern moves. Returns +inf when the objective is unbounded along a search ray.
ConjugateResult fenchel_conjugate_2d(const Function2d& f, std::array<double, 2> x,
                                     const ConjugateOptions& options = {});

}  // namespace robustq
