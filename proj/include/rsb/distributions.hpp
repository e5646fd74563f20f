#pragma once

#include <functional>

#include "rsb/quadrature.hpp"
#include "rsb/rng.hpp"

namespace rsb {

struct RsbParams {
  double a = 0.5;
  double b = 0.5;
  double delta = 0.0;  // tail exponent of the generalized family

  void validate() const;
};

double rsb_log_pdf(double u, const RsbParams& p);
double rsb_pdf(double u, const RsbParams& p);
// log density of u evaluated at u = e^t; exact for arbitrarily large t
double rsb_log_pdf_logu(double t, const RsbParams& p);
// log density of t = log u itself, without cancellation at large t
double rsb_log_pdf_t(double t, const RsbParams& p);
double rsb_cdf(double u0, const RsbParams& p);

// Deterministic map t ~ Beta(a,b) -> u.
double rsb_from_beta(double t);
double rsb_sample_direct(const RsbParams& p, RngStream& rng);
double rsb_sample_direct_log(const RsbParams& p, RngStream& rng);  // returns log u
double rsb_sample_hier(const RsbParams& p, RngStream& rng);
double rsb_sample_hier_log(const RsbParams& p, RngStream& rng);

double grsb_log_unnorm_pdf(double u, const RsbParams& p);
double grsb_unnorm_pdf(double u, const RsbParams& p);
double grsb_log_unnorm_pdf_logu(double t, const RsbParams& p);
double grsb_log_unnorm_pdf_t(double t, const RsbParams& p);
double grsb_log_normalizer(const RsbParams& p, const QuadratureOptions& opts = {});

// Mixing law on u > 0, given as the log density of t = log u
// (with respect to dt).
struct MixingDensity {
  std::function<double(double)> log_density_t;
};

MixingDensity rsb_mixing(const RsbParams& p);
MixingDensity grsb_mixing(const RsbParams& p);  // normalized by quadrature
MixingDensity exponential_mixing(double rate);

// Poisson kernel by default; finite nb_size switches to the negative binomial
// kernel of the Ga(d,d)-approximate likelihood.
struct CountKernel {
  double nb_size = std::numeric_limits<double>::infinity();
  double log_pmf(double y, double log_mean) const;
};

// log of  integral pi(u) K(y | e^z u) du
double marginal_count_log_pmf(double y, double z, const MixingDensity& mixing,
                              const CountKernel& kernel = {}, const QuadratureOptions& opts = {});
double marginal_count_pmf(double y, double z, const MixingDensity& mixing,
                          const CountKernel& kernel = {}, const QuadratureOptions& opts = {});

}  // namespace rsb
