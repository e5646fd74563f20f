#pragma once

#include <span>

namespace rsb {

double log_gamma_fn(double x);  // reentrant lgamma
double log_factorial(double k);
double log_beta_fn(double a, double b);

// Regularized incomplete beta I_x(a,b) by continued fraction.
double inc_beta(double a, double b, double x);

double log_add_exp(double a, double b);
double log_sum_exp(std::span<const double> v);
double softplus(double x);  // log(1 + e^x)
double log_expm1(double x); // log(e^x - 1), x > 0
double logit(double p);
double log_normal_cdf(double x);
double normal_cdf(double x);

double log_poisson_pmf(double y, double log_mean);
// Negative binomial with size r and mean e^log_mean.
double log_negbin_pmf(double y, double log_mean, double size);

}  // namespace rsb
