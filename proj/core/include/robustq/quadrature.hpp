#pragma once

#include <functional>

namespace robustq {

struct LogIntegralOptions {
  // Drop the integrand where it is below exp(-truncation) times its peak (about 1e-14).
  double truncation = 32.3;
  double rel_tol = 1e-12;
  double y_max = 1e7;
};

// log of the integral over (0, inf) of exp(phi(y)). Returns +inf when the integral
// diverges (phi = +inf somewhere, a non-decaying tail, or a non-integrable power
// singularity at 0) and -inf when phi is -inf everywhere.
double log_integral_half_line(const std::function<double(double)>& phi, const LogIntegralOptions& opt = {});

}  // namespace robustq
