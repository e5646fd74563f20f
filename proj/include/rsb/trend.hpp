#pragma once

#include <Eigen/Dense>

#include "rsb/eta_gibbs.hpp"
#include "rsb/glm.hpp"
#include "rsb/posterior.hpp"
#include "rsb/rng.hpp"

namespace rsb {

// (n-k) x n matrix of order-k forward differences, stored by its k+1
// row coefficients.
class DiffMatrix {
 public:
  DiffMatrix(Eigen::Index n, int k);

  Eigen::Index rows() const { return n_ - k_; }
  Eigen::Index cols() const { return n_; }
  int order() const { return k_; }
  const Eigen::VectorXd& coefficients() const { return coef_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& theta) const;
  Eigen::MatrixXd dense() const;

 private:
  Eigen::Index n_;
  int k_;
  Eigen::VectorXd coef_;
};

DiffMatrix diff_matrix(Eigen::Index n, int k);

struct HorseshoeState {
  Eigen::VectorXd lambda;  // local scales, one per difference
  Eigen::VectorXd psi;
  double tau2 = 1.0;
  double gamma = 1.0;

  static HorseshoeState initial(Eigen::Index m);
};

struct TrendState {
  Eigen::VectorXd theta;
  HorseshoeState hs;
  int k = 2;
};

enum class SolverPath { Banded, Dense };

struct ThetaOptions {
  SolverPath path = SolverPath::Banded;
  // Prior precision on theta_1..theta_k, which the differences leave flat.
  // Zero keeps them flat; positive values make the theta prior proper.
  double anchor = 0.0;
};

// Gaussian draw with precision Omega + D^T W D (+ anchor) and linear term
// kappa - Omega c, where the predictor is theta_i + c_i.
Eigen::VectorXd update_theta(const Eigen::VectorXd& kappa, const Eigen::VectorXd& omega, const Eigen::VectorXd& fixed,
                             const DiffMatrix& D, const HorseshoeState& hs, RngStream& rng,
                             const ThetaOptions& opts = {});

// Precision matrix and linear term used by update_theta, for checks.
Eigen::MatrixXd theta_precision(const Eigen::VectorXd& omega, const DiffMatrix& D, const HorseshoeState& hs,
                                double anchor = 0.0);

// lambda_j then psi_j for every difference
void update_local_scales(const Eigen::VectorXd& dtheta, HorseshoeState& hs, RngStream& rng);
// tau2 then gamma
void update_global_scale(const Eigen::VectorXd& dtheta, HorseshoeState& hs, RngStream& rng);
void update_horseshoe(const Eigen::VectorXd& dtheta, HorseshoeState& hs, RngStream& rng);

struct TrendConfig {
  ChainConfig chain;
  MixtureHyper mixture;
  ErrorModel error = ErrorModel::Mixture;
  double delta = kDefaultDelta;
  int k = 2;
  SolverPath path = SolverPath::Banded;
  bool record_latent = true;

  void validate() const;
};

PosteriorDraws fit_trend(const Eigen::VectorXd& y, const TrendConfig& config, RngStream& rng);

// Pointwise posterior median of e^theta.
Eigen::VectorXd trend_median_rate(const PosteriorDraws& draws, Eigen::Index n);

}  // namespace rsb
