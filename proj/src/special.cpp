#include "rsb/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rsb/errors.hpp"


namespace rsb {

double log_gamma_fn(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_factorial(double k) { return log_gamma_fn(k + 1.0); }

double log_beta_fn(double a, double b) {
  return log_gamma_fn(a) + log_gamma_fn(b) - log_gamma_fn(a + b);
}

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-14;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge");
}

}  // namespace

double inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("inc_beta: shapes must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("inc_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta_fn(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * beta_cf(a, b, x) / a;
  return 1.0 - std::exp(log_front) * beta_cf(b, a, 1.0 - x) / b;
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double softplus(double x) {
  if (x > 35.0) return x + std::exp(-x);
  if (x < -35.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double log_expm1(double x) {
  if (x > 35.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

double log_normal_cdf(double x) {
  if (x < -30.0) {
    // asymptotic Mills ratio
    const double x2 = x * x;
    return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) +
           std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
  }
  return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// log(y!) - (y + 1/2) log y + y - log(2 pi)/2
double stirling_remainder(double y) {
  if (y < 15.0) return log_factorial(y) - (y + 0.5) * std::log(y) + y - 0.5 * std::log(2.0 * std::numbers::pi);
  const double r = 1.0 / (y * y);
  return (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r / 1680.0))) / y;
}

// e^r - 1 - r without cancellation near zero
double expm1_minus(double r) {
  if (std::fabs(r) > 0.1) return std::expm1(r) - r;
  double term = 0.5 * r * r, sum = term;
  for (int k = 3; k < 30 && std::fabs(term) > 1e-17 * std::fabs(sum); ++k) {
    term *= r / k;
    sum += term;
  }
  return sum;
}

}  // namespace

double log_poisson_pmf(double y, double log_mean) {
  if (y == 0.0) return -std::exp(log_mean);
  // saddle-point form; the naive sum loses all digits for large counts
  const double ly = std::log(y);
  const double r = log_mean - ly;
  if (std::isinf(r)) return r > 0 ? -std::exp(log_mean) : -std::numeric_limits<double>::infinity();
  return -0.5 * (std::log(2.0 * std::numbers::pi) + ly) - stirling_remainder(y) - y * expm1_minus(r);
}

double log_negbin_pmf(double y, double log_mean, double size) {
  // log(mu/(r+mu)) and log(r/(r+mu)) via softplus for large mu
  const double lr = std::log(size);
  const double log_denom = lr + softplus(log_mean - lr);
  return log_gamma_fn(y + size) - log_gamma_fn(size) - log_factorial(y) + size * (lr - log_denom) +
         y * (log_mean - log_denom);
}

}  // namespace rsb
