#include "rsb/trend.hpp"

#include <cmath>

#include "rsb/banded.hpp"
#include "rsb/errors.hpp"
#include "rsb/pg_augment.hpp"
#include "rsb/special.hpp"

namespace rsb {

DiffMatrix::DiffMatrix(Eigen::Index n, int k) : n_(n), k_(k) {
  if (k < 1 || k >= n) throw std::domain_error("difference order must satisfy 1 <= k < n");
  coef_ = Eigen::VectorXd::Zero(k + 1);
  coef_[0] = 1.0;
  for (int r = 0; r < k; ++r) {
    // multiply the stencil by (-1, 1)
    Eigen::VectorXd next = Eigen::VectorXd::Zero(k + 1);
    for (int m = 0; m <= r; ++m) {
      next[m] -= coef_[m];
      next[m + 1] += coef_[m];
    }
    coef_ = next;
  }
}

Eigen::VectorXd DiffMatrix::apply(const Eigen::VectorXd& theta) const {
  if (theta.size() != n_) throw ConfigError("difference operator: length mismatch");
  Eigen::VectorXd out(rows());
  for (Eigen::Index j = 0; j < rows(); ++j) out[j] = coef_.dot(theta.segment(j, k_ + 1));
  return out;
}

Eigen::MatrixXd DiffMatrix::dense() const {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows(), n_);
  for (Eigen::Index j = 0; j < rows(); ++j) M.block(j, j, 1, k_ + 1) = coef_.transpose();
  return M;
}

DiffMatrix diff_matrix(Eigen::Index n, int k) { return DiffMatrix(n, k); }

HorseshoeState HorseshoeState::initial(Eigen::Index m) {
  return {Eigen::VectorXd::Ones(m), Eigen::VectorXd::Ones(m), 1.0, 1.0};
}

namespace {

constexpr double kScaleFloor = 1e-12;

Eigen::VectorXd difference_weights(const HorseshoeState& hs) {
  return (hs.lambda.array() * hs.tau2).max(kScaleFloor).inverse();
}

BandedSpd banded_precision(const Eigen::VectorXd& omega, const DiffMatrix& D, const Eigen::VectorXd& W, double anchor) {
  const Eigen::Index n = D.cols();
  const int k = D.order();
  const Eigen::VectorXd& c = D.coefficients();
  BandedSpd Q(n, k);
  for (Eigen::Index i = 0; i < n; ++i) Q(i, i) = omega[i] + (i < k ? anchor : 0.0);
  for (Eigen::Index j = 0; j < D.rows(); ++j)
    for (int m1 = 0; m1 <= k; ++m1)
      for (int m2 = 0; m2 <= m1; ++m2) Q(j + m1, j + m2) += W[j] * c[m1] * c[m2];
  return Q;
}

}  // namespace

Eigen::MatrixXd theta_precision(const Eigen::VectorXd& omega, const DiffMatrix& D, const HorseshoeState& hs,
                                double anchor) {
  return banded_precision(omega, D, difference_weights(hs), anchor).dense();
}

Eigen::VectorXd update_theta(const Eigen::VectorXd& kappa, const Eigen::VectorXd& omega, const Eigen::VectorXd& fixed,
                             const DiffMatrix& D, const HorseshoeState& hs, RngStream& rng, const ThetaOptions& opts) {
  const Eigen::Index n = D.cols();
  if (kappa.size() != n || omega.size() != n || fixed.size() != n || hs.lambda.size() != D.rows())
    throw ConfigError("update_theta: length mismatch");
  const Eigen::VectorXd W = difference_weights(hs);
  const Eigen::VectorXd b = kappa - omega.cwiseProduct(fixed);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();

  if (opts.path == SolverPath::Dense) {
    const Eigen::MatrixXd Q = banded_precision(omega, D, W, opts.anchor).dense();
    Eigen::LLT<Eigen::MatrixXd> llt(Q);
    if (llt.info() != Eigen::Success) throw NumericError("theta precision not positive definite");
    return llt.solve(b) + llt.matrixU().solve(z);
  }
  BandedSpd Q = banded_precision(omega, D, W, opts.anchor);
  if (!Q.factorize()) {
    Q = banded_precision(omega, D, W, opts.anchor);
    for (Eigen::Index i = 0; i < n; ++i) Q(i, i) += 1e-8 * std::max(1.0, Q.get(i, i));
    if (!Q.factorize()) throw NumericError("theta precision not positive definite after jitter");
  }
  return Q.solve(b) + Q.solve_upper(z);
}

void update_local_scales(const Eigen::VectorXd& dtheta, HorseshoeState& hs, RngStream& rng) {
  const Eigen::Index m = dtheta.size();
  if (hs.lambda.size() != m || hs.psi.size() != m) throw ConfigError("update_horseshoe: length mismatch");
  for (Eigen::Index j = 0; j < m; ++j) {
    const double d2 = dtheta[j] * dtheta[j];
    hs.lambda[j] = rng.inv_gamma(1.0, 1.0 / hs.psi[j] + d2 / (2.0 * hs.tau2));
    hs.psi[j] = rng.inv_gamma(1.0, 1.0 + 1.0 / hs.lambda[j]);
  }
}

void update_global_scale(const Eigen::VectorXd& dtheta, HorseshoeState& hs, RngStream& rng) {
  const Eigen::Index m = dtheta.size();
  if (hs.lambda.size() != m) throw ConfigError("update_horseshoe: length mismatch");
  const double ss = (dtheta.array().square() / hs.lambda.array()).sum();
  hs.tau2 = rng.inv_gamma(0.5 * (static_cast<double>(m) + 1.0), 1.0 / hs.gamma + 0.5 * ss);
  hs.gamma = rng.inv_gamma(1.0, 1.0 + 1.0 / hs.tau2);
}

void update_horseshoe(const Eigen::VectorXd& dtheta, HorseshoeState& hs, RngStream& rng) {
  update_local_scales(dtheta, hs, rng);
  update_global_scale(dtheta, hs, rng);
}

void TrendConfig::validate() const {
  chain.validate();
  if (error != ErrorModel::Unit) mixture.validate();
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  if (k < 1) throw ConfigError("difference order k must be at least 1");
}

PosteriorDraws fit_trend(const Eigen::VectorXd& y, const TrendConfig& config, RngStream& rng) {
  config.validate();
  const Eigen::Index n = y.size();
  if (n < config.k + 2) throw ConfigError("trend filter needs n >= k + 2");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(y[i] >= 0.0) || std::floor(y[i]) != y[i]) throw ConfigError("count at row " + std::to_string(i) + " is invalid");
  const DiffMatrix D(n, config.k);
  const double log_delta = std::log(config.delta);

  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < n; ++i) names.push_back(indexed("theta", i));
  for (Eigen::Index i = 0; i < n; ++i) names.push_back(indexed("rate", i));
  names.push_back("tau2");
  names.push_back("s");
  if (config.record_latent) {
    for (Eigen::Index i = 0; i < n; ++i) names.push_back(indexed("z", i));
    for (Eigen::Index i = 0; i < n; ++i) names.push_back(indexed("eta", i));
  }
  names.push_back("loglik");
  PosteriorDraws draws(names, config.chain.iterations);

  TrendState state;
  state.k = config.k;
  state.theta = (y.array() + 1.0).log();
  state.hs = HorseshoeState::initial(D.rows());
  EtaLatentState eta = EtaLatentState::initial(static_cast<std::size_t>(n));
  SMode s_mode = SMode::Free;
  if (config.error == ErrorModel::Unit) eta.s = 0.0;
  if (config.error == ErrorModel::PureRsb) {
    eta.s = 1.0;
    s_mode = SMode::Fixed;
  }
  const Eigen::VectorXd kappa = (y.array() - config.delta) * 0.5;
  Eigen::VectorXd omega(n);
  ThetaOptions topts;
  topts.path = config.path;

  Eigen::Index row = 0;
  for (std::size_t sweep = 0; sweep < config.chain.total_sweeps(); ++sweep) {
    if (config.error != ErrorModel::Unit) eta_step(y, state.theta, eta, config.mixture, rng, s_mode);
    const Eigen::VectorXd log_eta = eta.log_eta();
    const Eigen::VectorXd fixed = log_eta.array() - log_delta;
    for (Eigen::Index i = 0; i < n; ++i) omega[i] = update_omega(y[i], state.theta[i] + fixed[i], config.delta, rng);
    state.theta = update_theta(kappa, omega, fixed, D, state.hs, rng, topts);
    if (!state.theta.allFinite()) throw NumericError("non-finite trend state");
    update_horseshoe(D.apply(state.theta), state.hs, rng);
    if (!config.chain.keep(sweep)) continue;
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < n; ++i) draws.at(row, c++) = state.theta[i];
    for (Eigen::Index i = 0; i < n; ++i) draws.at(row, c++) = std::exp(state.theta[i]);
    draws.at(row, c++) = state.hs.tau2;
    draws.at(row, c++) = eta.s;
    if (config.record_latent) {
      for (Eigen::Index i = 0; i < n; ++i) draws.at(row, c++) = eta.z[static_cast<std::size_t>(i)];
      for (Eigen::Index i = 0; i < n; ++i) draws.at(row, c++) = std::exp(log_eta[i]);
    }
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ll += log_poisson_pmf(y[i], state.theta[i] + log_eta[i]);
    draws.at(row, c++) = ll;
    ++row;
  }
  return draws;
}

Eigen::VectorXd trend_median_rate(const PosteriorDraws& draws, Eigen::Index n) {
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = draws.quantile(indexed("rate", i), 0.5);
  return out;
}

}  // namespace rsb
