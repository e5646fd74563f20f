#include "rsb/polya_gamma.hpp"

#include <cmath>
#include <numbers>

#include "rsb/errors.hpp"
#include "rsb/special.hpp"

namespace rsb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTrunc = 0.64;

// Series coefficients of the Jacobi density, piecewise at the truncation point.
double a_coef(int n, double x) {
  const double k = n + 0.5;
  if (x > kTrunc) return kPi * k * std::exp(-0.5 * k * k * kPi * kPi * x);
  return std::pow(2.0 / (kPi * x), 1.5) * kPi * k * std::exp(-2.0 * k * k / x);
}

double log_ig_cdf_part(double t, double z) {
  // log of the inverse-Gaussian (mean 1/z, shape 1) cdf at t, times e^{-z}
  const double st = std::sqrt(1.0 / t);
  const double b = st * (t * z - 1.0);
  const double a = -st * (t * z + 1.0);
  return log_add_exp(-z + log_normal_cdf(b), z + log_normal_cdf(a));
}

// Inverse-Gaussian(1/z, 1) truncated to (0, kTrunc).
double truncated_ig(double z, RngStream& rng) {
  const double t = kTrunc;
  if (z < 1.0 / t) {
    // mean beyond the truncation point: Levy proposal with rejection
    for (;;) {
      double e1, e2;
      do {
        e1 = rng.exponential();
        e2 = rng.exponential();
      } while (e1 * e1 > 2.0 * e2 / t);
      double x = 1.0 + e1 * t;
      x = t / (x * x);
      if (rng.uniform() <= std::exp(-0.5 * z * z * x)) return x;
    }
  }
  const double mu = 1.0 / z;
  for (;;) {
    double y = rng.normal();
    y *= y;
    double x = mu + 0.5 * mu * mu * y - 0.5 * mu * std::sqrt(4.0 * mu * y + (mu * y) * (mu * y));
    if (rng.uniform() > mu / (mu + x)) x = mu * mu / x;
    if (x < t) return x;
  }
}

double gaussian_path(double shape, double tilt, RngStream& rng) {
  const double m = pg_mean(shape, tilt);
  const double sd = std::sqrt(pg_variance(shape, tilt));
  const double x = m + sd * rng.normal();
  return x > 0.0 ? x : 1e-3 * m;
}

// Truncated series sum_k g_k / ((k-1/2)^2 + c^2/(4 pi^2)) / (2 pi^2) with the
// neglected terms replaced by their expectation.
double series_path(double shape, double tilt, RngStream& rng) {
  const double c2 = tilt * tilt / (4.0 * kPi * kPi);
  double x = 0.0, partial_mean = 0.0;
  for (int k = 1; k <= kPgSeriesTerms; ++k) {
    const double d = (k - 0.5) * (k - 0.5) + c2;
    x += rng.gamma(shape) / d;
    partial_mean += shape / d;
  }
  const double scale = 1.0 / (2.0 * kPi * kPi);
  const double tail = std::max(0.0, pg_mean(shape, tilt) - partial_mean * scale);
  return x * scale + tail;
}

}  // namespace

double pg_mean(double shape, double tilt) {
  const double c = std::fabs(tilt);
  if (c < 1e-4) return shape * (0.25 - c * c / 48.0);
  return shape * std::tanh(0.5 * c) / (2.0 * c);
}

double pg_variance(double shape, double tilt) {
  const double c = std::fabs(tilt);
  if (c < 1e-3) return shape * (1.0 / 24.0 - c * c / 120.0);
  if (c > 1.0) {
    // (sinh c - c)/cosh^2(c/2) rewritten with e^{-c} to avoid overflow
    const double e = std::exp(-c);
    const double ratio = 2.0 * (1.0 - e * e - 2.0 * c * e) / ((1.0 + e) * (1.0 + e));
    return shape * ratio / (4.0 * c * c * c);
  }
  const double ch = std::cosh(0.5 * c);
  return shape * (std::sinh(c) - c) / (4.0 * c * c * c * ch * ch);
}

double pg_sample_unit(double tilt, RngStream& rng) {
  const double z = 0.5 * std::fabs(tilt);
  const double K = kPi * kPi / 8.0 + 0.5 * z * z;
  const double log_p = std::log(0.5 * kPi / K) - K * kTrunc;
  const double log_q = std::log(2.0) + log_ig_cdf_part(kTrunc, z);
  const double prob_right = 1.0 / (1.0 + std::exp(log_q - log_p));
  for (;;) {
    double x;
    if (rng.uniform() < prob_right)
      x = kTrunc + rng.exponential() / K;
    else
      x = truncated_ig(z, rng);
    double s = a_coef(0, x);
    const double y = rng.uniform() * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= a_coef(n, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += a_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

double pg_sample(double shape, double tilt, RngStream& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw NumericError("pg_sample: shape must be positive");
  if (!std::isfinite(tilt)) throw NumericError("pg_sample: tilt must be finite");
  if (shape > kPgExactShapeLimit) return gaussian_path(shape, tilt, rng);
  const double whole = std::floor(shape);
  const double frac = shape - whole;
  double x = 0.0;
  for (int i = 0; i < static_cast<int>(whole); ++i) x += pg_sample_unit(tilt, rng);
  if (frac > 1e-12) x += series_path(frac, tilt, rng);
  return x;
}

}  // namespace rsb
