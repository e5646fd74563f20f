#include "rsb/distributions.hpp"

#include <cmath>
#include <stdexcept>

#include "rsb/errors.hpp"
#include "rsb/special.hpp"

namespace rsb {

void RsbParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw ConfigError("rsb shapes a and b must be positive");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("rsb tail exponent delta must be nonnegative");
}

namespace {

void check_u(double u, const char* who) {
  if (!(u > 0.0) || !std::isfinite(u)) throw std::domain_error(std::string(who) + ": argument must be positive and finite");
}

void check_plain(const RsbParams& p, const char* who) {
  p.validate();
  if (p.delta != 0.0) throw std::domain_error(std::string(who) + ": delta > 0 belongs to the generalized family");
}

double log_of_softplus(double t) { return t < -35.0 ? t : std::log(softplus(t)); }

}  // namespace

double rsb_log_pdf(double u, const RsbParams& p) {
  check_u(u, "rsb_pdf");
  check_plain(p, "rsb_pdf");
  const double L = std::log1p(u);
  return (p.a - 1.0) * std::log(L) - L - (p.a + p.b) * std::log1p(L) - log_beta_fn(p.a, p.b);
}

double rsb_pdf(double u, const RsbParams& p) { return std::exp(rsb_log_pdf(u, p)); }

double rsb_log_pdf_logu(double t, const RsbParams& p) {
  if (std::isnan(t)) throw std::domain_error("rsb_pdf: NaN argument");
  const double L = softplus(t);
  return (p.a - 1.0) * log_of_softplus(t) - L - (p.a + p.b) * std::log1p(L) - log_beta_fn(p.a, p.b);
}

double rsb_log_pdf_t(double t, const RsbParams& p) {
  if (std::isnan(t)) throw std::domain_error("rsb_pdf: NaN argument");
  const double L = softplus(t);
  return (p.a - 1.0) * log_of_softplus(t) - softplus(-t) - (p.a + p.b) * std::log1p(L) - log_beta_fn(p.a, p.b);
}

double rsb_cdf(double u0, const RsbParams& p) {
  if (!(u0 > 0.0)) throw std::domain_error("rsb_cdf: argument must be positive");
  check_plain(p, "rsb_cdf");
  if (std::isinf(u0)) return 1.0;
  const double L = std::log1p(u0);
  return inc_beta(p.a, p.b, L / (1.0 + L));
}

double rsb_from_beta(double t) { return std::expm1(t / (1.0 - t)); }

double rsb_sample_direct_log(const RsbParams& p, RngStream& rng) {
  check_plain(p, "rsb_sample_direct");
  // t/(1-t) for t ~ Be(a,b) is the ratio of independent gammas
  const double ratio = std::exp(rng.log_gamma(p.a) - rng.log_gamma(p.b));
  return log_expm1(ratio);
}

double rsb_sample_direct(const RsbParams& p, RngStream& rng) { return std::exp(rsb_sample_direct_log(p, rng)); }

double rsb_sample_hier_log(const RsbParams& p, RngStream& rng) {
  check_plain(p, "rsb_sample_hier");
  if (!(p.a < 1.0)) throw std::domain_error("rsb_sample_hier: requires 0 < a < 1");
  const double log_w = rng.log_beta(p.a, 1.0 - p.a);
  const double z = std::exp(rng.log_gamma(p.b) - log_w);
  const double log_v = rng.log_gamma(z);
  return std::log(rng.exponential()) - log_v;
}

double rsb_sample_hier(const RsbParams& p, RngStream& rng) { return std::exp(rsb_sample_hier_log(p, rng)); }

double grsb_log_unnorm_pdf(double u, const RsbParams& p) {
  check_u(u, "grsb_unnorm_pdf");
  p.validate();
  return (p.a - 1.0) * std::log(u) - (p.a + p.delta) * std::log1p(u) - (1.0 + p.b) * std::log1p(std::log1p(u));
}

double grsb_unnorm_pdf(double u, const RsbParams& p) { return std::exp(grsb_log_unnorm_pdf(u, p)); }

double grsb_log_unnorm_pdf_logu(double t, const RsbParams& p) {
  const double L = softplus(t);
  return (p.a - 1.0) * t - (p.a + p.delta) * L - (1.0 + p.b) * std::log1p(L);
}

double grsb_log_unnorm_pdf_t(double t, const RsbParams& p) {
  const double L = softplus(t);
  return -p.a * softplus(-t) - p.delta * L - (1.0 + p.b) * std::log1p(L);
}

double grsb_log_normalizer(const RsbParams& p, const QuadratureOptions& opts) {
  p.validate();
  auto f = [&](double t) { return grsb_log_unnorm_pdf_t(t, p); };
  return integrate_exp(f, opts).log_value;
}

MixingDensity rsb_mixing(const RsbParams& p) {
  check_plain(p, "rsb_mixing");
  return {[p](double t) { return rsb_log_pdf_t(t, p); }};
}

MixingDensity grsb_mixing(const RsbParams& p) {
  const double log_z = grsb_log_normalizer(p);
  return {[p, log_z](double t) { return grsb_log_unnorm_pdf_t(t, p) - log_z; }};
}

MixingDensity exponential_mixing(double rate) {
  if (!(rate > 0.0)) throw ConfigError("exponential mixing rate must be positive");
  const double lr = std::log(rate);
  return {[rate, lr](double t) { return lr + t - rate * std::exp(t); }};
}

double CountKernel::log_pmf(double y, double log_mean) const {
  if (std::isinf(nb_size)) return log_poisson_pmf(y, log_mean);
  return log_negbin_pmf(y, log_mean, nb_size);
}

double marginal_count_log_pmf(double y, double z, const MixingDensity& mixing, const CountKernel& kernel,
                              const QuadratureOptions& opts) {
  if (!(y >= 0.0) || std::floor(y) != y) throw std::domain_error("marginal_count_pmf: y must be a nonnegative integer");
  // integrate in the offset from the kernel peak so the kernel argument is exact
  const double peak = std::log(y + 0.5);
  const double shift = peak - z;
  auto f = [&](double x) { return mixing.log_density_t(shift + x) + kernel.log_pmf(y, peak + x); };
  QuadratureOptions o = opts;
  o.hint = 0.0;
  o.lower = opts.lower - shift;
  o.upper = opts.upper - shift;
  return integrate_exp(f, o).log_value;
}

double marginal_count_pmf(double y, double z, const MixingDensity& mixing, const CountKernel& kernel,
                          const QuadratureOptions& opts) {
  return std::exp(marginal_count_log_pmf(y, z, mixing, kernel, opts));
}

}  // namespace rsb
