#pragma once

#include <Eigen/Dense>
#include <optional>

#include "rsb/dataset.hpp"
#include "rsb/eta_gibbs.hpp"
#include "rsb/glm.hpp"
#include "rsb/posterior.hpp"
#include "rsb/rng.hpp"

namespace rsb {

// k-means centres with farthest-point seeding. Returns fewer than M rows when
// clusters collapse onto duplicate points; `reduced` reports that.
Eigen::MatrixXd select_knots(const Eigen::MatrixXd& coords, Eigen::Index M, RngStream& rng, bool* reduced = nullptr);

double spatial_correlation(double dist2, double h);  // exp(-d^2 / (2 h^2))
double max_pairwise_distance(const Eigen::MatrixXd& pts);

// Knot correlation matrix H_h with its cached Cholesky factor.
class PredictiveProcess {
 public:
  static constexpr double kJitter = 1e-8;

  PredictiveProcess(Eigen::MatrixXd knots, double h);

  Eigen::Index knots_count() const { return knots_.rows(); }
  double bandwidth() const { return h_; }
  const Eigen::MatrixXd& knots() const { return knots_; }
  const Eigen::MatrixXd& correlation() const { return H_; }

  Eigen::VectorXd cross_correlation(const Eigen::Vector2d& s) const;  // V_h(s)
  Eigen::VectorXd weights(const Eigen::Vector2d& s) const;            // H^{-1} V_h(s)
  Eigen::MatrixXd weight_matrix(const Eigen::MatrixXd& coords) const; // columns D_h(s_i), M x n
  Eigen::MatrixXd precision() const;                                  // H^{-1}
  double quad_form(const Eigen::VectorXd& mu) const;                  // mu^T H^{-1} mu
  double log_det() const;

 private:
  Eigen::MatrixXd knots_;
  double h_;
  Eigen::MatrixXd H_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

Eigen::VectorXd predictive_weights(const Eigen::Vector2d& s, const Eigen::MatrixXd& knots, double h);

struct SpatialPriors {
  BetaPrior beta;
  double a_tau = 1.0;
  double b_tau = 1.0;
  double h_lo = 0.0;  // (0, 0) means the default fraction of the knot span
  double h_hi = 0.0;
};

struct SpatialState {
  Eigen::VectorXd beta;
  Eigen::VectorXd mu;  // knot-level process values
  Eigen::MatrixXd knots;
  double h = 1.0;
  double tau = 1.0;
  double h_lo = 0.0, h_hi = 0.0;

  // proposal scale on log h and its adaptation window
  double log_step = std::log(0.2);
  std::size_t window_accepted = 0, window_tries = 0;
  std::size_t accepted = 0, tries = 0;

  std::optional<PredictiveProcess> process;
  Eigen::MatrixXd weights;  // D_h, M x n

  Eigen::VectorXd xi() const { return weights.transpose() * mu; }
  void refresh(const Eigen::MatrixXd& coords);
};

struct SpatialDesign {
  const Eigen::MatrixXd& A;       // n x q fixed-effect design
  const Eigen::VectorXd& offset;  // log areas
  const Eigen::MatrixXd& coords;
};

// tau | mu ~ Ga(a_tau + M/2, b_tau + mu^T H^{-1} mu / 2)
void update_spatial_tau(SpatialState& state, const SpatialPriors& priors, RngStream& rng);

// One pass of the block: joint Gaussian draw of (beta, mu), tau from its
// gamma conditional, then a random-walk step on log h. `adapt` tunes the
// step toward 30% acceptance.
void update_spatial_block(SpatialState& state, const Eigen::VectorXd& kappa, const Eigen::VectorXd& omega,
                          const Eigen::VectorXd& log_eta, double delta, const SpatialDesign& design,
                          const SpatialPriors& priors, RngStream& rng, bool adapt = false);

// log target of h on the log scale, up to a constant.
double spatial_log_h_target(double h, const SpatialState& state, const Eigen::VectorXd& kappa,
                            const Eigen::VectorXd& omega, const Eigen::VectorXd& fixed_no_xi,
                            const Eigen::MatrixXd& coords);

struct SpatialConfig {
  ChainConfig chain;
  MixtureHyper mixture;
  ErrorModel error = ErrorModel::Mixture;
  double delta = kDefaultDelta;
  Eigen::Index M = 100;
  SpatialPriors priors;
  bool intercept = true;
  bool record_latent = true;

  void validate() const;
};

PosteriorDraws fit_spatial(const CountDataset& data, const SpatialConfig& config, RngStream& rng);

// Deviance information criterion using the plug-in posterior means of the
// linear predictor components and of eta.
double spatial_dic(const PosteriorDraws& draws, const CountDataset& data, bool intercept = true);

}  // namespace rsb
