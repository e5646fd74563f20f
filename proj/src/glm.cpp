#include "rsb/glm.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "rsb/errors.hpp"
#include "rsb/special.hpp"

namespace rsb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double penalized_objective(const Eigen::Ref<const Eigen::MatrixXd>& A, const Eigen::Ref<const Eigen::VectorXd>& y,
                           const Eigen::Ref<const Eigen::VectorXd>& o, const Eigen::VectorXd& b,
                           const GaussianPrior* pen) {
  double f = poisson_loglik(A, y, o, b);
  if (pen) {
    const Eigen::VectorXd d = b - pen->mean;
    f -= 0.5 * d.dot(pen->precision * d);
  }
  return std::isnan(f) ? kNegInf : f;
}

void check_predictor(const Eigen::VectorXd& lin) {
  for (Eigen::Index i = 0; i < lin.size(); ++i)
    if (!std::isfinite(lin[i])) throw NumericError("non-finite linear predictor at row " + std::to_string(i));
}

double log_phi(const Eigen::VectorXd& x, const NewtonResult& m) {
  const Eigen::VectorXd d = x - m.beta;
  return -0.5 * d.dot(m.information * d);
}

}  // namespace

GaussianPrior BetaPrior::resolve(Eigen::Index dim) const {
  const Eigen::VectorXd m = mean.size() ? mean : Eigen::VectorXd::Zero(dim);
  if (m.size() != dim) throw ConfigError("prior mean has the wrong dimension");
  if (cov.size()) {
    if (cov.rows() != dim || cov.cols() != dim) throw ConfigError("prior covariance has the wrong dimension");
    return GaussianPrior::from_covariance(m, cov);
  }
  GaussianPrior g = GaussianPrior::isotropic(dim, variance);
  g.mean = m;
  return g;
}

void GlmConfig::validate() const {
  chain.validate();
  if (error != ErrorModel::Unit) mixture.validate();
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
}

void PoissonGammaConfig::validate() const {
  chain.validate();
  if (!(c_lo > 0.0) || !(c_hi > c_lo)) throw ConfigError("Poisson-gamma c bounds must satisfy 0 < c_lo < c_hi");
  if (fixed_c && !(*fixed_c > 0.0)) throw ConfigError("fixed c must be positive");
}

double poisson_loglik(const Eigen::Ref<const Eigen::MatrixXd>& A, const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::VectorXd>& log_offset, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd lin = A * beta + log_offset;
  return (y.array() * lin.array() - lin.array().exp()).sum();
}

NewtonResult poisson_newton(const Eigen::Ref<const Eigen::MatrixXd>& A, const Eigen::Ref<const Eigen::VectorXd>& y,
                            const Eigen::Ref<const Eigen::VectorXd>& log_offset, const Eigen::VectorXd& start,
                            const GaussianPrior* penalty, int max_iter, double tol) {
  NewtonResult r;
  r.beta = start;
  const double scale = std::max(1.0, y.sum());
  double f = penalized_objective(A, y, log_offset, r.beta, penalty);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd mu = (A * r.beta + log_offset).array().exp();
    Eigen::VectorXd grad = A.transpose() * (y - mu);
    Eigen::MatrixXd info = A.transpose() * mu.asDiagonal() * A;
    if (penalty) {
      grad -= penalty->precision * (r.beta - penalty->mean);
      info += penalty->precision;
    }
    r.iterations = it;
    r.grad_norm = grad.norm();
    if (!std::isfinite(r.grad_norm)) break;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
    const Eigen::VectorXd step = ldlt.solve(grad);
    const double decrement = grad.dot(step);
    if (r.grad_norm <= tol * scale || decrement < 1e-24 * scale) {
      r.converged = true;
      break;
    }
    double t = 1.0;
    bool moved = false;
    for (int h = 0; h < 60; ++h, t *= 0.5) {
      const Eigen::VectorXd cand = r.beta + t * step;
      const double fc = penalized_objective(A, y, log_offset, cand, penalty);
      if (fc >= f - 1e-12 * std::fabs(f)) {
        r.beta = cand;
        f = fc;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  const Eigen::VectorXd mu = (A * r.beta + log_offset).array().exp();
  r.information = A.transpose() * mu.asDiagonal() * A;
  return r;
}

double MhBetaSampler::log_ratio(const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                                const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::MatrixXd>& A,
                                const Eigen::Ref<const Eigen::VectorXd>& log_offset) const {
  const double lr = poisson_loglik(A, y, log_offset, to) - poisson_loglik(A, y, log_offset, from) +
                    log_phi(from, mode_) - log_phi(to, mode_);
  return std::isnan(lr) ? kNegInf : lr;
}

MhBetaSampler::Step MhBetaSampler::update(const Eigen::VectorXd& beta, const Eigen::Ref<const Eigen::VectorXd>& y,
                                          const Eigen::Ref<const Eigen::MatrixXd>& A,
                                          const Eigen::Ref<const Eigen::VectorXd>& log_offset,
                                          const GaussianPrior& prior, RngStream& rng) {
  Step out{beta, false, false, 0.0};
  const Eigen::VectorXd start = has_mode_ ? mode_.beta : beta;
  NewtonResult m = poisson_newton(A, y, log_offset, start);
  if (!m.converged) m = poisson_newton(A, y, log_offset, start, &prior);
  if (!m.converged || !m.beta.allFinite()) {
    out.flagged = true;
    return out;
  }
  mode_ = std::move(m);
  has_mode_ = true;
  // proposal N(A~, B~) with B~ = (S^-1 + B^-1)^-1, A~ = B~ (S^-1 b^ + B^-1 A)
  const Eigen::MatrixXd Q = mode_.information + prior.precision;
  const Eigen::VectorXd lin = mode_.information * mode_.beta + prior.precision * prior.mean;
  Eigen::VectorXd proposal;
  try {
    proposal = draw_gaussian_canonical(Q, lin, rng);
  } catch (const NumericError&) {
    out.flagged = true;
    return out;
  }
  out.log_ratio = log_ratio(beta, proposal, y, A, log_offset);
  if (out.log_ratio >= 0.0 || std::log(rng.uniform()) < out.log_ratio) {
    out.beta = std::move(proposal);
    out.accepted = true;
  }
  return out;
}

MhBetaSampler::Step mh_beta_update(const Eigen::VectorXd& beta, const Eigen::Ref<const Eigen::VectorXd>& y,
                                   const Eigen::Ref<const Eigen::MatrixXd>& A,
                                   const Eigen::Ref<const Eigen::VectorXd>& log_eta, const GaussianPrior& prior,
                                   RngStream& rng) {
  MhBetaSampler s;
  return s.update(beta, y, A, log_eta, prior, rng);
}

PosteriorDraws fit_glm_rsb(const CountDataset& data, const GlmConfig& config, RngStream& rng) {
  data.validate();
  config.validate();
  const Eigen::MatrixXd A = config.intercept ? data.design(true) : data.X;
  const Eigen::Index n = data.n(), q = A.cols();
  if (q == 0) throw ConfigError("model has no coefficients");
  const Eigen::VectorXd off = data.offset_or_zero();
  const GaussianPrior prior = config.prior.resolve(q);
  const bool use_pg = config.path == BetaPath::PgAugmented || (config.path == BetaPath::Auto && q > 10);
  const double log_delta = std::log(config.delta);

  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < q; ++j) names.push_back(indexed("beta", j));
  names.push_back("s");
  if (config.record_latent) {
    for (Eigen::Index i = 0; i < n; ++i) names.push_back(indexed("z", i));
    for (Eigen::Index i = 0; i < n; ++i) names.push_back(indexed("eta", i));
  }
  names.push_back("loglik");
  PosteriorDraws draws(names, config.chain.iterations);

  EtaLatentState st = EtaLatentState::initial(static_cast<std::size_t>(n));
  SMode s_mode = SMode::Free;
  if (config.error == ErrorModel::Unit) st.s = 0.0;
  if (config.error == ErrorModel::PureRsb) {
    st.s = 1.0;
    s_mode = SMode::Fixed;
  }

  Eigen::VectorXd start = Eigen::VectorXd::Zero(q);
  if (config.intercept) start[0] = std::log((data.y.sum() + 0.5) / (off.array().exp().sum()));
  Eigen::VectorXd beta = poisson_newton(A, data.y, off, start, &prior).beta;

  MhBetaSampler mh;
  Eigen::VectorXd omega = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd kappa = (data.y.array() - config.delta) * 0.5;
  std::size_t accepted = 0, steps = 0, flagged = 0, window_acc = 0, window_steps = 0;
  double z_total = 0.0, window_z = 0.0;
  Eigen::Index row = 0;

  for (std::size_t sweep = 0; sweep < config.chain.total_sweeps(); ++sweep) {
    Eigen::VectorXd lin = A * beta + off;
    check_predictor(lin);
    if (config.error != ErrorModel::Unit) eta_step(data.y, lin, st, config.mixture, rng, s_mode);
    const Eigen::VectorXd log_eta = st.log_eta();
    const Eigen::VectorXd fixed = off + log_eta;
    if (use_pg) {
      for (Eigen::Index i = 0; i < n; ++i) omega[i] = update_omega(data.y[i], lin[i] + log_eta[i] - log_delta, config.delta, rng);
      beta = gaussian_coeff_update(A, omega, kappa, fixed.array() - log_delta, prior, rng);
      ++accepted;
      ++window_acc;
    } else {
      const auto step = mh.update(beta, data.y, A, fixed, prior, rng);
      beta = step.beta;
      accepted += step.accepted;
      window_acc += step.accepted;
      flagged += step.flagged;
    }
    ++steps;
    ++window_steps;
    const double zfrac = static_cast<double>(st.outlier_count()) / static_cast<double>(n);
    window_z += zfrac;
    if (config.monitor && (sweep + 1) % 100 == 0) {
      config.monitor({sweep + 1, static_cast<double>(window_acc) / static_cast<double>(window_steps),
                      window_z / static_cast<double>(window_steps)});
      window_acc = window_steps = 0;
      window_z = 0.0;
    }
    if (!config.chain.keep(sweep)) continue;
    z_total += zfrac;
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < q; ++j) draws.at(row, c++) = beta[j];
    draws.at(row, c++) = st.s;
    if (config.record_latent) {
      for (Eigen::Index i = 0; i < n; ++i) draws.at(row, c++) = st.z[static_cast<std::size_t>(i)];
      for (Eigen::Index i = 0; i < n; ++i) draws.at(row, c++) = std::exp(log_eta[i]);
    }
    const Eigen::VectorXd lp = A * beta + fixed;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ll += log_poisson_pmf(data.y[i], lp[i]);
    draws.at(row, c++) = ll;
    ++row;
  }
  draws.diagnostics["acceptance_rate"] = static_cast<double>(accepted) / static_cast<double>(steps);
  draws.diagnostics["flagged_steps"] = static_cast<double>(flagged);
  draws.diagnostics["mean_outlier_fraction"] = z_total / static_cast<double>(config.chain.iterations);
  draws.diagnostics["pg_path"] = use_pg ? 1.0 : 0.0;
  return draws;
}

MleResult poisson_mle(const CountDataset& data, bool intercept) {
  data.validate();
  const Eigen::MatrixXd A = intercept ? data.design(true) : data.X;
  const Eigen::VectorXd off = data.offset_or_zero();
  Eigen::VectorXd start = Eigen::VectorXd::Zero(A.cols());
  if (intercept) start[0] = std::log(std::max(data.y.mean(), 1e-8) / off.array().exp().mean());
  const NewtonResult r = poisson_newton(A, data.y, off, start);
  MleResult out;
  out.beta = r.beta;
  out.converged = r.converged;
  out.iterations = r.iterations;
  out.grad_norm = r.grad_norm;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(r.information);
  const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(A.cols(), A.cols()));
  out.se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

PosteriorDraws fit_poisson_gamma(const CountDataset& data, const PoissonGammaConfig& config, RngStream& rng) {
  data.validate();
  config.validate();
  const Eigen::MatrixXd A = config.intercept ? data.design(true) : data.X;
  const Eigen::Index n = data.n(), q = A.cols();
  const Eigen::VectorXd off = data.offset_or_zero();
  const GaussianPrior prior = config.prior.resolve(q);

  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < q; ++j) names.push_back(indexed("beta", j));
  names.push_back("c");
  if (config.record_latent)
    for (Eigen::Index i = 0; i < n; ++i) names.push_back(indexed("u", i));
  names.push_back("loglik");
  PosteriorDraws draws(names, config.chain.iterations);

  Eigen::VectorXd start = Eigen::VectorXd::Zero(q);
  if (config.intercept) start[0] = std::log((data.y.sum() + 0.5) / off.array().exp().sum());
  Eigen::VectorXd beta = poisson_newton(A, data.y, off, start, &prior).beta;
  Eigen::VectorXd log_u = Eigen::VectorXd::Zero(n);
  double c = config.fixed_c.value_or(1.0);
  double log_step = std::log(0.5);
  std::size_t c_acc = 0, c_tries = 0, window_acc = 0, window = 0, accepted = 0;
  const double lo = std::log(config.c_lo), hi = std::log(config.c_hi);

  auto c_target = [&](double lc) {
    const double cc = std::exp(lc);
    // product of Ga(u_i; c, c) densities plus the log-c Jacobian of the uniform prior
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += (cc - 1.0) * log_u[i] - cc * std::exp(log_u[i]);
    return static_cast<double>(n) * (cc * lc - log_gamma_fn(cc)) + s + lc;
  };

  MhBetaSampler mh;
  Eigen::Index row = 0;
  for (std::size_t sweep = 0; sweep < config.chain.total_sweeps(); ++sweep) {
    const Eigen::VectorXd lin = A * beta + off;
    check_predictor(lin);
    for (Eigen::Index i = 0; i < n; ++i)
      log_u[i] = rng.log_gamma(c + data.y[i]) - std::log(c + std::exp(lin[i]));
    if (!config.fixed_c) {
      const double lc = std::log(c);
      const double prop = lc + std::exp(log_step) * rng.normal();
      bool acc = false;
      if (prop > lo && prop < hi) {
        const double r = c_target(prop) - c_target(lc);
        acc = r >= 0.0 || std::log(rng.uniform()) < r;
      }
      if (acc) c = std::exp(prop);
      ++c_tries;
      c_acc += acc;
      window_acc += acc;
      ++window;
      if (sweep < config.chain.burnin && window == 50) {
        const double rate = static_cast<double>(window_acc) / 50.0;
        log_step += rate > 0.44 ? 0.1 : -0.1;
        window = window_acc = 0;
      }
    }
    const Eigen::VectorXd fixed = off + log_u;
    const auto step = mh.update(beta, data.y, A, fixed, prior, rng);
    beta = step.beta;
    accepted += step.accepted;
    if (!config.chain.keep(sweep)) continue;
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j < q; ++j) draws.at(row, col++) = beta[j];
    draws.at(row, col++) = c;
    if (config.record_latent)
      for (Eigen::Index i = 0; i < n; ++i) draws.at(row, col++) = std::exp(log_u[i]);
    const Eigen::VectorXd lp = A * beta + fixed;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ll += log_poisson_pmf(data.y[i], lp[i]);
    draws.at(row, col++) = ll;
    ++row;
  }
  draws.diagnostics["acceptance_rate"] = static_cast<double>(accepted) / static_cast<double>(config.chain.total_sweeps());
  draws.diagnostics["c_acceptance_rate"] = c_tries ? static_cast<double>(c_acc) / static_cast<double>(c_tries) : 0.0;
  return draws;
}

}  // namespace rsb
