#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "rsb/dataset.hpp"
#include "rsb/eta_gibbs.hpp"
#include "rsb/pg_augment.hpp"
#include "rsb/posterior.hpp"
#include "rsb/rng.hpp"

namespace rsb {

enum class BetaPath { Auto, IndependentMH, PgAugmented };

enum class ErrorModel {
  Mixture,  // (1-s) point mass at one + s RSB
  Unit,     // eta fixed at one
  PureRsb   // s fixed at one
};

struct BetaPrior {
  Eigen::VectorXd mean;  // empty means zero
  Eigen::MatrixXd cov;   // empty means variance * I
  double variance = 100.0;

  GaussianPrior resolve(Eigen::Index dim) const;
};

struct MonitorRecord {
  std::size_t sweep;
  double acceptance_rate;
  double outlier_fraction;
};

struct GlmConfig {
  ChainConfig chain;
  BetaPrior prior;
  BetaPath path = BetaPath::Auto;
  MixtureHyper mixture;
  ErrorModel error = ErrorModel::Mixture;
  double delta = kDefaultDelta;
  bool intercept = true;
  bool record_latent = true;
  std::function<void(const MonitorRecord&)> monitor;  // called every 100 sweeps

  void validate() const;
};

struct NewtonResult {
  Eigen::VectorXd beta;
  Eigen::MatrixXd information;  // negative Hessian of the log likelihood at beta
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

// Maximizes sum_i y_i a_i'b - exp(a_i'b + o_i), optionally plus a Gaussian
// log prior, by damped Newton from `start`.
NewtonResult poisson_newton(const Eigen::Ref<const Eigen::MatrixXd>& A, const Eigen::Ref<const Eigen::VectorXd>& y,
                            const Eigen::Ref<const Eigen::VectorXd>& log_offset, const Eigen::VectorXd& start,
                            const GaussianPrior* penalty = nullptr, int max_iter = 100, double tol = 1e-10);

double poisson_loglik(const Eigen::Ref<const Eigen::MatrixXd>& A, const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::VectorXd>& log_offset, const Eigen::VectorXd& beta);

// Independent Metropolis-Hastings step centred on the Laplace approximation
// of the likelihood. Keeps the previous mode as a warm start.
class MhBetaSampler {
 public:
  struct Step {
    Eigen::VectorXd beta;
    bool accepted = false;
    bool flagged = false;
    double log_ratio = 0.0;
  };

  Step update(const Eigen::VectorXd& beta, const Eigen::Ref<const Eigen::VectorXd>& y,
              const Eigen::Ref<const Eigen::MatrixXd>& A, const Eigen::Ref<const Eigen::VectorXd>& log_offset,
              const GaussianPrior& prior, RngStream& rng);

  // log acceptance ratio for a given proposal, using the mode met by the last update
  double log_ratio(const Eigen::VectorXd& from, const Eigen::VectorXd& to, const Eigen::Ref<const Eigen::VectorXd>& y,
                   const Eigen::Ref<const Eigen::MatrixXd>& A, const Eigen::Ref<const Eigen::VectorXd>& log_offset) const;

  const NewtonResult& last_mode() const { return mode_; }

 private:
  NewtonResult mode_;
  bool has_mode_ = false;
};

MhBetaSampler::Step mh_beta_update(const Eigen::VectorXd& beta, const Eigen::Ref<const Eigen::VectorXd>& y,
                                   const Eigen::Ref<const Eigen::MatrixXd>& A,
                                   const Eigen::Ref<const Eigen::VectorXd>& log_eta, const GaussianPrior& prior,
                                   RngStream& rng);

PosteriorDraws fit_glm_rsb(const CountDataset& data, const GlmConfig& config, RngStream& rng);

struct MleResult {
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

MleResult poisson_mle(const CountDataset& data, bool intercept = true);

struct PoissonGammaConfig {
  ChainConfig chain;
  BetaPrior prior;
  bool intercept = true;
  double c_lo = 1e-3;
  double c_hi = 1e3;
  std::optional<double> fixed_c;
  bool record_latent = false;

  void validate() const;
};

PosteriorDraws fit_poisson_gamma(const CountDataset& data, const PoissonGammaConfig& config, RngStream& rng);

}  // namespace rsb
