#pragma once

#include <Eigen/Dense>

#include "rsb/rng.hpp"

namespace rsb {

inline constexpr double kDefaultDelta = 1000.0;

struct GaussianPrior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd precision;

  static GaussianPrior isotropic(Eigen::Index dim, double variance);
  static GaussianPrior from_covariance(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);
};

struct AugmentState {
  Eigen::VectorXd omega;
  double delta = kDefaultDelta;
};

double update_omega(double y, double psi, double delta, RngStream& rng);

inline double kappa_of(double y, double delta) { return 0.5 * (y - delta); }

// Draw theta from the Gaussian with precision sum_i omega_i a_i a_i^T + P0 and
// linear term sum_i a_i (kappa_i - omega_i c_i) + P0 m0, where c_i is the part
// of the predictor psi_i = a_i^T theta + c_i that does not involve theta.
Eigen::VectorXd gaussian_coeff_update(const Eigen::Ref<const Eigen::MatrixXd>& A,
                                      const Eigen::Ref<const Eigen::VectorXd>& omega,
                                      const Eigen::Ref<const Eigen::VectorXd>& kappa,
                                      const Eigen::Ref<const Eigen::VectorXd>& fixed, const GaussianPrior& prior,
                                      RngStream& rng);

// Convenience form with c_i = log eta_i - log delta.
Eigen::VectorXd gaussian_coeff_update(const Eigen::Ref<const Eigen::MatrixXd>& A,
                                      const Eigen::Ref<const Eigen::VectorXd>& omega,
                                      const Eigen::Ref<const Eigen::VectorXd>& kappa,
                                      const Eigen::Ref<const Eigen::VectorXd>& eta, double delta,
                                      const GaussianPrior& prior, RngStream& rng);

// Draws N(Q^{-1} b, Q^{-1}); jitters the diagonal once on failure.
Eigen::VectorXd draw_gaussian_canonical(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b, RngStream& rng);

}  // namespace rsb
