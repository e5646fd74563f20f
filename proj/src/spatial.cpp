#include "rsb/spatial.hpp"

#include <cmath>
#include <limits>

#include "rsb/errors.hpp"
#include "rsb/pg_augment.hpp"
#include "rsb/special.hpp"

namespace rsb {

Eigen::MatrixXd select_knots(const Eigen::MatrixXd& coords, Eigen::Index M, RngStream& rng, bool* reduced) {
  const Eigen::Index n = coords.rows();
  if (coords.cols() != 2) throw ConfigError("coordinates must have two columns");
  if (M < 1 || M > n) throw ConfigError("number of knots must satisfy 1 <= M <= n");
  if (reduced) *reduced = false;

  std::vector<Eigen::Index> seeds{static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(n)))};
  Eigen::VectorXd mind = (coords.rowwise() - coords.row(seeds[0])).rowwise().squaredNorm();
  while (static_cast<Eigen::Index>(seeds.size()) < M) {
    Eigen::Index far = 0;
    const double dmax = mind.maxCoeff(&far);  // first maximum = lowest index
    if (!(dmax > 0.0)) break;
    seeds.push_back(far);
    mind = mind.cwiseMin((coords.rowwise() - coords.row(far)).rowwise().squaredNorm());
  }
  Eigen::MatrixXd centers(static_cast<Eigen::Index>(seeds.size()), 2);
  for (std::size_t c = 0; c < seeds.size(); ++c) centers.row(static_cast<Eigen::Index>(c)) = coords.row(seeds[c]);

  std::vector<Eigen::Index> label(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      (centers.rowwise() - coords.row(i)).rowwise().squaredNorm().minCoeff(&best);
      if (label[static_cast<std::size_t>(i)] != best) {
        label[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(centers.rows(), 2);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(centers.rows());
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(label[static_cast<std::size_t>(i)]) += coords.row(i);
      counts[label[static_cast<std::size_t>(i)]] += 1.0;
    }
    for (Eigen::Index c = 0; c < centers.rows(); ++c)
      if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];
    if (!changed) break;
  }
  // drop clusters that ended up empty
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(centers.rows());
  for (auto l : label) counts[l] += 1.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < centers.rows(); ++c)
    if (counts[c] > 0) keep.push_back(c);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(keep.size()), 2);
  for (std::size_t r = 0; r < keep.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = centers.row(keep[r]);
  if (reduced) *reduced = out.rows() < M;
  return out;
}

double spatial_correlation(double dist2, double h) { return std::exp(-dist2 / (2.0 * h * h)); }

double max_pairwise_distance(const Eigen::MatrixXd& pts) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = i + 1; j < pts.rows(); ++j) best = std::max(best, (pts.row(i) - pts.row(j)).squaredNorm());
  return std::sqrt(best);
}

PredictiveProcess::PredictiveProcess(Eigen::MatrixXd knots, double h) : knots_(std::move(knots)), h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("bandwidth must be positive");
  const Eigen::Index M = knots_.rows();
  H_.resize(M, M);
  for (Eigen::Index i = 0; i < M; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) H_(i, j) = H_(j, i) = spatial_correlation((knots_.row(i) - knots_.row(j)).squaredNorm(), h);
  Eigen::MatrixXd Hj = H_;
  Hj.diagonal().array() += kJitter;
  llt_.compute(Hj);
  if (llt_.info() != Eigen::Success) throw NumericError("knot correlation matrix singular after jitter");
}

Eigen::VectorXd PredictiveProcess::cross_correlation(const Eigen::Vector2d& s) const {
  Eigen::VectorXd v(knots_.rows());
  for (Eigen::Index j = 0; j < knots_.rows(); ++j)
    v[j] = spatial_correlation((knots_.row(j).transpose() - s).squaredNorm(), h_);
  return v;
}

Eigen::VectorXd PredictiveProcess::weights(const Eigen::Vector2d& s) const { return llt_.solve(cross_correlation(s)); }

Eigen::MatrixXd PredictiveProcess::weight_matrix(const Eigen::MatrixXd& coords) const {
  Eigen::MatrixXd V(knots_.rows(), coords.rows());
  for (Eigen::Index i = 0; i < coords.rows(); ++i) V.col(i) = cross_correlation(coords.row(i).transpose());
  return llt_.solve(V);
}

Eigen::MatrixXd PredictiveProcess::precision() const {
  return llt_.solve(Eigen::MatrixXd::Identity(knots_.rows(), knots_.rows()));
}

double PredictiveProcess::quad_form(const Eigen::VectorXd& mu) const {
  const Eigen::VectorXd r = llt_.matrixL().solve(mu);
  return r.squaredNorm();
}

double PredictiveProcess::log_det() const { return 2.0 * llt_.matrixLLT().diagonal().array().log().sum(); }

Eigen::VectorXd predictive_weights(const Eigen::Vector2d& s, const Eigen::MatrixXd& knots, double h) {
  return PredictiveProcess(knots, h).weights(s);
}

void SpatialState::refresh(const Eigen::MatrixXd& coords) {
  process.emplace(knots, h);
  weights = process->weight_matrix(coords);
}

double spatial_log_h_target(double h, const SpatialState& state, const Eigen::VectorXd& kappa,
                            const Eigen::VectorXd& omega, const Eigen::VectorXd& fixed_no_xi,
                            const Eigen::MatrixXd& coords) {
  const PredictiveProcess pp(state.knots, h);
  const Eigen::VectorXd xi = pp.weight_matrix(coords).transpose() * state.mu;
  const Eigen::VectorXd psi = fixed_no_xi + xi;
  const double lik = (kappa.array() * psi.array() - 0.5 * omega.array() * psi.array().square()).sum();
  return -0.5 * pp.log_det() - 0.5 * state.tau * pp.quad_form(state.mu) + lik;
}

void update_spatial_tau(SpatialState& state, const SpatialPriors& priors, RngStream& rng) {
  if (!state.process) throw ConfigError("spatial state has no factorized process");
  const double M = static_cast<double>(state.mu.size());
  state.tau = rng.gamma(priors.a_tau + 0.5 * M, priors.b_tau + 0.5 * state.process->quad_form(state.mu));
}

void update_spatial_block(SpatialState& state, const Eigen::VectorXd& kappa, const Eigen::VectorXd& omega,
                          const Eigen::VectorXd& log_eta, double delta, const SpatialDesign& design,
                          const SpatialPriors& priors, RngStream& rng, bool adapt) {
  const Eigen::Index n = design.A.rows(), q = design.A.cols(), M = state.knots.rows();
  if (!state.process) state.refresh(design.coords);
  const double log_delta = std::log(delta);

  // (beta, mu) jointly
  Eigen::MatrixXd full(n, q + M);
  full.leftCols(q) = design.A;
  full.rightCols(M) = state.weights.transpose();
  const GaussianPrior bp = priors.beta.resolve(q);
  GaussianPrior joint{Eigen::VectorXd::Zero(q + M), Eigen::MatrixXd::Zero(q + M, q + M)};
  joint.mean.head(q) = bp.mean;
  joint.precision.topLeftCorner(q, q) = bp.precision;
  joint.precision.bottomRightCorner(M, M) = state.tau * state.process->precision();
  const Eigen::VectorXd fixed = design.offset + log_eta - Eigen::VectorXd::Constant(n, log_delta);
  const Eigen::VectorXd theta = gaussian_coeff_update(full, omega, kappa, fixed, joint, rng);
  state.beta = theta.head(q);
  state.mu = theta.tail(M);

  update_spatial_tau(state, priors, rng);

  // random walk on log h; the uniform prior contributes the Jacobian term
  const double h_new = state.h * std::exp(std::exp(state.log_step) * rng.normal());
  bool acc = false;
  if (h_new > state.h_lo && h_new < state.h_hi) {
    const Eigen::VectorXd base = design.A * state.beta + fixed;
    const double cur = spatial_log_h_target(state.h, state, kappa, omega, base, design.coords) + std::log(state.h);
    const double prop = spatial_log_h_target(h_new, state, kappa, omega, base, design.coords) + std::log(h_new);
    const double r = prop - cur;
    acc = r >= 0.0 || std::log(rng.uniform()) < r;
  }
  if (acc) {
    state.h = h_new;
    state.refresh(design.coords);
  }
  ++state.tries;
  state.accepted += acc;
  ++state.window_tries;
  state.window_accepted += acc;
  if (state.window_tries == 50) {
    if (adapt) {
      const double rate = static_cast<double>(state.window_accepted) / 50.0;
      state.log_step += rate > 0.3 ? 0.1 : -0.1;
    }
    state.window_tries = state.window_accepted = 0;
  }
}

void SpatialConfig::validate() const {
  chain.validate();
  if (error != ErrorModel::Unit) mixture.validate();
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  if (M < 1) throw ConfigError("number of knots must be positive");
  if (!(priors.a_tau > 0.0) || !(priors.b_tau > 0.0)) throw ConfigError("tau prior parameters must be positive");
  if (priors.h_lo != 0.0 || priors.h_hi != 0.0)
    if (!(priors.h_lo > 0.0) || !(priors.h_hi > priors.h_lo)) throw ConfigError("bandwidth bounds must satisfy 0 < h_lo < h_hi");
}

PosteriorDraws fit_spatial(const CountDataset& data, const SpatialConfig& config, RngStream& rng) {
  data.validate();
  config.validate();
  if (!data.has_coords()) throw ConfigError("spatial model needs lon/lat coordinates");
  const Eigen::MatrixXd A = config.intercept ? data.design(true) : data.X;
  const Eigen::Index n = data.n(), q = A.cols();
  const Eigen::VectorXd off = data.offset_or_zero();
  const double log_delta = std::log(config.delta);

  RngStream knot_rng = rng.split(0x6b6e6f74);
  SpatialState st;
  const Eigen::Index M = std::min(config.M, n);
  st.knots = select_knots(data.coords, M, knot_rng);
  const double span = max_pairwise_distance(st.knots);
  if (config.priors.h_lo > 0.0) {
    st.h_lo = config.priors.h_lo;
    st.h_hi = config.priors.h_hi;
  } else {
    if (!(span > 0.0)) throw ConfigError("knots coincide; cannot set bandwidth bounds");
    st.h_lo = 0.01 * span;
    st.h_hi = 0.5 * span;
  }
  st.h = std::sqrt(st.h_lo * st.h_hi);
  st.tau = 1.0;
  st.mu = Eigen::VectorXd::Zero(st.knots.rows());
  const GaussianPrior bp = config.priors.beta.resolve(q);
  Eigen::VectorXd start = Eigen::VectorXd::Zero(q);
  if (config.intercept) start[0] = std::log((data.y.sum() + 0.5) / off.array().exp().sum());
  st.beta = poisson_newton(A, data.y, off, start, &bp).beta;
  st.refresh(data.coords);

  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < q; ++j) names.push_back(indexed("beta", j));
  names.insert(names.end(), {"tau", "h", "s"});
  for (Eigen::Index i = 0; i < n; ++i) names.push_back(indexed("xi", i));
  if (config.record_latent) {
    for (Eigen::Index i = 0; i < n; ++i) names.push_back(indexed("z", i));
    for (Eigen::Index i = 0; i < n; ++i) names.push_back(indexed("eta", i));
  }
  names.push_back("loglik");
  PosteriorDraws draws(names, config.chain.iterations);

  EtaLatentState eta = EtaLatentState::initial(static_cast<std::size_t>(n));
  SMode s_mode = SMode::Free;
  if (config.error == ErrorModel::Unit) eta.s = 0.0;
  if (config.error == ErrorModel::PureRsb) {
    eta.s = 1.0;
    s_mode = SMode::Fixed;
  }
  const Eigen::VectorXd kappa = (data.y.array() - config.delta) * 0.5;
  Eigen::VectorXd omega(n);
  const SpatialDesign design{A, off, data.coords};
  std::size_t post_acc = 0, post_tries = 0;

  Eigen::Index row = 0;
  for (std::size_t sweep = 0; sweep < config.chain.total_sweeps(); ++sweep) {
    const Eigen::VectorXd lin = A * st.beta + off + st.xi();
    if (!lin.allFinite()) throw NumericError("non-finite spatial predictor");
    if (config.error != ErrorModel::Unit) eta_step(data.y, lin, eta, config.mixture, rng, s_mode);
    const Eigen::VectorXd log_eta = eta.log_eta();
    for (Eigen::Index i = 0; i < n; ++i) omega[i] = update_omega(data.y[i], lin[i] + log_eta[i] - log_delta, config.delta, rng);
    const std::size_t acc_before = st.accepted;
    update_spatial_block(st, kappa, omega, log_eta, config.delta, design, config.priors, rng, sweep < config.chain.burnin);
    if (sweep >= config.chain.burnin) {
      ++post_tries;
      post_acc += st.accepted - acc_before;
    }
    if (!config.chain.keep(sweep)) continue;
    const Eigen::VectorXd xi = st.xi();
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < q; ++j) draws.at(row, c++) = st.beta[j];
    draws.at(row, c++) = st.tau;
    draws.at(row, c++) = st.h;
    draws.at(row, c++) = eta.s;
    for (Eigen::Index i = 0; i < n; ++i) draws.at(row, c++) = xi[i];
    if (config.record_latent) {
      for (Eigen::Index i = 0; i < n; ++i) draws.at(row, c++) = eta.z[static_cast<std::size_t>(i)];
      for (Eigen::Index i = 0; i < n; ++i) draws.at(row, c++) = std::exp(log_eta[i]);
    }
    const Eigen::VectorXd lp = A * st.beta + off + xi + log_eta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ll += log_poisson_pmf(data.y[i], lp[i]);
    draws.at(row, c++) = ll;
    ++row;
  }
  draws.diagnostics["h_acceptance_rate"] = post_tries ? static_cast<double>(post_acc) / static_cast<double>(post_tries) : 0.0;
  draws.diagnostics["knots"] = static_cast<double>(st.knots.rows());
  draws.diagnostics["h_lo"] = st.h_lo;
  draws.diagnostics["h_hi"] = st.h_hi;
  return draws;
}

double spatial_dic(const PosteriorDraws& draws, const CountDataset& data, bool intercept) {
  const Eigen::MatrixXd A = intercept ? data.design(true) : data.X;
  const Eigen::Index n = data.n();
  Eigen::VectorXd beta(A.cols());
  for (Eigen::Index j = 0; j < A.cols(); ++j) beta[j] = draws.mean(indexed("beta", j));
  Eigen::VectorXd lp = A * beta + data.offset_or_zero();
  for (Eigen::Index i = 0; i < n; ++i) {
    lp[i] += draws.mean(indexed("xi", i));
    if (draws.has(indexed("eta", i))) lp[i] += std::log(draws.mean(indexed("eta", i)));
  }
  double ll_hat = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) ll_hat += log_poisson_pmf(data.y[i], lp[i]);
  const Eigen::VectorXd ll = draws.column("loglik");
  return -4.0 * ll.mean() + 2.0 * ll_hat;
}

}  // namespace rsb
