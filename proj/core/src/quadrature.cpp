#include "robustq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace robustq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGridStart = 1e-12;
constexpr double kGridRatio = 1.3;

double safe_phi(const std::function<double(double)>& phi, double y) {
  const double v = phi(y);
  return std::isnan(v) ? -kInf : v;
}

// Maximise phi on [lo, hi] by golden section; returns (argmax, max).
std::pair<double, double> refine_peak(const std::function<double(double)>& phi, double lo, double hi) {
  constexpr double g = 0.3819660112501051;
  double a = lo, c = hi;
  double b = a + g * (c - a);
  double fb = safe_phi(phi, b);
  for (int it = 0; it < 200 && (c - a) > 1e-13 * std::max(1e-300, b); ++it) {
    const bool right = (c - b) > (b - a);
    const double x = right ? b + g * (c - b) : b - g * (b - a);
    const double fx = safe_phi(phi, x);
    if (fx > fb) {
      (right ? a : c) = b;
      b = x;
      fb = fx;
    } else {
      (right ? c : a) = x;
    }
  }
  return {b, fb};
}

double integrate_segment(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  // The integrator grows its abscissa tables lazily, so each thread keeps its own.
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  try {
    return integrator.integrate(f, a, b, tol);
  } catch (const std::exception&) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, tol);
  }
}

}  // namespace

double log_integral_half_line(const std::function<double(double)>& phi, const LogIntegralOptions& opt) {
  std::vector<double> ys{0.0};
  for (double y = kGridStart; y < opt.y_max * kGridRatio; y *= kGridRatio) ys.push_back(y);
  std::vector<double> vals(ys.size());
  std::size_t jmax = 0;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    vals[j] = safe_phi(phi, ys[j]);
    // A pole at 0 alone is left to the power-law test below.
    if (j == 0 && vals[j] == kInf) vals[j] = -kInf;
    if (vals[j] == kInf) return kInf;
    if (vals[j] > vals[jmax]) jmax = j;
  }
  const double grid_peak = vals[jmax];
  if (grid_peak == -kInf) return -kInf;
  const double threshold = grid_peak - opt.truncation;
  if (vals.back() >= threshold) return kInf;  // tail has not decayed by y_max

  // Power-law singularity y^d at 0 is integrable only for d > -1.
  const double d = (vals[1] - vals[19]) / (std::log(ys[1]) - std::log(ys[19]));
  if (vals[1] >= threshold && std::isfinite(d) && d <= -1.0 + 1e-9 && vals[1] > vals[19]) return kInf;

  double y_star = ys[jmax];
  double peak = grid_peak;
  if (jmax > 0 && jmax + 1 < ys.size()) {
    const auto [yr, fr] = refine_peak(phi, ys[jmax - 1], ys[jmax + 1]);
    if (fr > peak) {
      y_star = yr;
      peak = fr;
    }
  }

  std::size_t l = 0;
  while (l < ys.size() && vals[l] < threshold) ++l;
  std::size_t r = ys.size() - 1;
  while (r > 0 && vals[r] < threshold) --r;
  double left = l == 0 ? 0.0 : ys[l - 1];
  double right = ys[std::min(r + 1, ys.size() - 1)];
  // Hard support edges (phi = -inf beyond them) are located so no segment straddles a jump.
  auto edge = [&](double in, double out) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (in + out);
      if (mid == in || mid == out) break;
      (safe_phi(phi, mid) == -kInf ? out : in) = mid;
    }
    return out;
  };
  if (l > 0 && vals[l - 1] == -kInf) left = edge(ys[l], left);
  if (r + 1 < ys.size() && vals[r + 1] == -kInf) right = edge(ys[r], right);

  // Width scale: distance from the peak to where phi has dropped by one unit.
  double w = 0.0;
  for (std::size_t j = jmax + 1; j < ys.size(); ++j) {
    if (vals[j] < peak - 1.0) {
      w = ys[j] - y_star;
      break;
    }
  }
  if (!(w > 0.0)) w = std::max(ys[1], y_star);

  const auto f = [&](double y) {
    const double v = phi(y);
    if (std::isnan(v)) return 0.0;
    return std::exp(v - peak);
  };

  double total = 0.0;
  // Left of the peak: one segment (endpoint clustering handles singularities at 0).
  total += integrate_segment(f, std::min(left, y_star), y_star, opt.rel_tol);
  // Right of the peak: geometric subdivision in units of the width scale.
  double a = y_star;
  for (double step = w; a < right; step *= 8.0) {
    const double b = std::min(right, y_star + step);
    total += integrate_segment(f, a, b, opt.rel_tol);
    a = b;
  }
  if (!(total > 0.0)) return -kInf;
  return peak + std::log(total);
}

}  // namespace robustq
