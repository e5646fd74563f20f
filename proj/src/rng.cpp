#include "rsb/rng.hpp"

#include <cmath>
#include <limits>

#include "rsb/errors.hpp"
#include "rsb/special.hpp"

namespace rsb {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// Marsaglia-Tsang, shape >= 1, returned on the log scale.
double log_gamma_mt(RngStream& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_(stream_id), engine_(make_engine(seed, stream_id)) {}

RngStream RngStream::split(std::uint64_t id) const {
  return RngStream(seed_, splitmix64(stream_ ^ splitmix64(id + 0x632be59bd9b4e019ULL)));
}

double RngStream::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double x, y, r2;
  do {
    x = 2.0 * uniform() - 1.0;
    y = 2.0 * uniform() - 1.0;
    r2 = x * x + y * y;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double f = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_normal_ = y * f;
  has_spare_ = true;
  return x * f;
}

double RngStream::exponential(double rate) { return -std::log(uniform()) / rate; }

double RngStream::log_gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw NumericError("gamma shape must be positive and finite");
  if (shape >= 1.0) return log_gamma_mt(*this, shape);
  // Ga(a) = Ga(a+1) * U^(1/a), done in logs so tiny shapes do not underflow
  return log_gamma_mt(*this, shape + 1.0) + std::log(uniform()) / shape;
}

double RngStream::gamma(double shape, double rate) { return std::exp(log_gamma(shape)) / rate; }

double RngStream::log_beta(double a, double b) {
  const double lx = log_gamma(a);
  const double ly = log_gamma(b);
  return lx - log_add_exp(lx, ly);
}

double RngStream::beta(double a, double b) { return std::exp(log_beta(a, b)); }

double RngStream::inv_gamma(double shape, double scale) {
  return scale * std::exp(-log_gamma(shape));
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

double RngStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw NumericError("poisson mean must be nonnegative");
  if (mean == 0.0) return 0.0;
  if (!std::isfinite(mean)) return std::numeric_limits<double>::max();
  if (mean > 1e12) return std::max(0.0, std::round(mean + std::sqrt(mean) * normal()));
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    double prod = uniform();
    double k = 0.0;
    while (prod > limit) {
      prod *= uniform();
      k += 1.0;
    }
    return k;
  }
  // PTRS transformed rejection (Hormann 1993)
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * log_mean - log_factorial(k))
      return k;
  }
}

double RngStream::poisson_log(double log_mean) {
  // beyond ~1e300 the count is returned as its mean
  if (log_mean > 690.0) return std::exp(std::min(log_mean, 690.0));
  return poisson(std::exp(log_mean));
}

std::size_t RngStream::uniform_index(std::size_t n) {
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

}  // namespace rsb
