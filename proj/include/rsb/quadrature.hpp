#pragma once

#include <cstddef>
#include <functional>
#include <limits>

namespace rsb {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  std::size_t max_evaluations = 1000000;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  double hint = 0.0;        // starting point of the mode search
  double fail_tol = 1e-7;   // relative error above which integration throws
};

struct QuadratureResult {
  double log_value;
  double rel_error;
  std::size_t evaluations;
};

// Integrates exp(log_f(t)) over [lower, upper]. The integrand must be
// unimodal or close to it; pieces grow geometrically away from the mode so
// that both sharp peaks and algebraic tails are resolved.
QuadratureResult integrate_exp(const std::function<double(double)>& log_f,
                               const QuadratureOptions& opts = {});

}  // namespace rsb
