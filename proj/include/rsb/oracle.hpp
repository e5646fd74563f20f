#pragma once

#include <Eigen/Dense>

#include "rsb/distributions.hpp"
#include "rsb/pg_augment.hpp"

namespace rsb {

// Observation-level law of y_i given its log rate z_i, with the multiplicative
// error integrated out.
struct ObservationModel {
  enum class Weight {
    None,      // eta fixed at one
    Fixed,     // (1-s) point mass + s mixing density
    BetaPrior  // as Fixed with s ~ Beta(a_s, b_s) integrated out exactly
  };

  MixingDensity mixing;
  CountKernel kernel;
  Weight weight = Weight::Fixed;
  double s = 0.1;
  double a_s = 1.0;
  double b_s = 1.0;
};

struct OracleOptions {
  Eigen::Index nodes = 81;         // per dimension in refinement rounds
  double half_width_sd = 10.0;     // box half-width in posterior sds
  double coarse_half_width = 12.0; // first round half-width around the start
  double spline_step = 0.01;       // tabulation step of the mixed pmf in z
  double target_error = 1e-6;
  int max_rounds = 6;
  Eigen::VectorXd tilt;            // optional linear term t'beta added to the log posterior
};

struct OracleResult {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double error = 0.0;  // change in the mean under grid refinement
  Eigen::Index grid_points = 0;
};

// Posterior moments of beta (dimension 1 or 2) by tensor-grid quadrature.
OracleResult quadrature_posterior_oracle(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                          const Eigen::VectorXd& offset, const ObservationModel& model,
                                          const GaussianPrior& prior, const OracleOptions& opts = {});

// log p(y | beta) under the observation model.
double oracle_log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& log_rate, const ObservationModel& model);

// P(eta < eps | y = 0) when the Poisson rate apart from eta is lambda and
// eta ~ (1-s) point mass at one + s RSB(a, b).
double zero_count_origin_probability(double lambda, double eps, const RsbParams& p, double s);

}  // namespace rsb
