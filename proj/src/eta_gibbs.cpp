#include "rsb/eta_gibbs.hpp"

#include <cmath>
#include <limits>

#include "rsb/errors.hpp"
#include "rsb/special.hpp"

namespace rsb {

void MixtureHyper::validate() const {
  if (!(a_s > 0.0) || !(b_s > 0.0)) throw ConfigError("mixture weight prior a_s, b_s must be positive");
  rsb.validate();
  if (rsb.delta != 0.0) throw ConfigError("mixture error uses the plain rescaled-beta density (delta = 0)");
  if (!(rsb.a < 1.0)) throw ConfigError("mixture error requires a < 1");
}

EtaLatentState EtaLatentState::initial(std::size_t n) {
  EtaLatentState st;
  st.z.assign(n, 0);
  st.log_eta2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  st.log_u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  st.v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  st.w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  st.s = 0.1;
  return st;
}

Eigen::VectorXd EtaLatentState::log_eta() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) out[static_cast<Eigen::Index>(i)] = log_eta(i);
  return out;
}

Eigen::VectorXd EtaLatentState::eta() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) out[static_cast<Eigen::Index>(i)] = eta(i);
  return out;
}

std::size_t EtaLatentState::outlier_count() const {
  std::size_t k = 0;
  for (auto zi : z) k += zi;
  return k;
}

double z_probability_log(double y, double log_lambda, double log_eta2, double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  log_lambda = std::max(log_lambda, std::log(kMinRate));
  // s Po(y; eta2 lambda) / ((1-s) Po(y; lambda))
  double log_odds = logit(s) + y * log_eta2;
  if (log_eta2 > 0.0) {
    // lambda (eta2 - 1) may be finite although eta2 itself overflows
    const double log_excess = log_lambda + log_expm1(log_eta2);
    log_odds -= log_excess > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(log_excess);
  } else {
    log_odds -= std::exp(log_lambda) * std::expm1(log_eta2);
  }
  if (std::isnan(log_odds)) throw NumericError("non-finite outlier log odds");
  if (log_odds > 0.0) return 1.0 / (1.0 + std::exp(-log_odds));
  const double e = std::exp(log_odds);
  return e / (1.0 + e);
}

double z_probability(double y, double lambda, double eta2, double s) {
  return z_probability_log(y, std::log(std::max(lambda, kMinRate)), std::log(eta2), s);
}

bool update_z_log(double y, double log_lambda, double log_eta2, double s, RngStream& rng) {
  const double p = z_probability_log(y, log_lambda, log_eta2, s);
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return rng.uniform() < p;
}

bool update_z(double y, double lambda, double eta2, double s, RngStream& rng) {
  return update_z_log(y, std::log(std::max(lambda, kMinRate)), std::log(eta2), s, rng);
}

double update_eta2_log(double y, bool z, double log_lambda, double log_u, RngStream& rng) {
  if (z) {
    log_lambda = std::max(log_lambda, std::log(kMinRate));
    return rng.log_gamma(y + 1.0) - log_add_exp(log_lambda, log_u);
  }
  return rng.log_gamma(1.0) - log_u;
}

double update_eta2(double y, bool z, double lambda, double u, RngStream& rng) {
  return std::exp(update_eta2_log(y, z, std::log(std::max(lambda, kMinRate)), std::log(u), rng));
}

Latents update_latents_log(double log_eta2, const MixtureHyper& hyper, RngStream& rng) {
  const double a = hyper.rsb.a, b = hyper.rsb.b;
  const double L = softplus(log_eta2);  // log(1 + eta2)
  const double v = std::min(std::exp(rng.log_gamma(1.0 - a) - std::log(L)), kMaxLatent);
  const double w = std::min(std::exp(rng.log_gamma(a + b) - std::log1p(L)), kMaxLatent);
  const double log_u = rng.log_gamma(v + w + 1.0) - L;
  return {v, w, log_u};
}

double update_s(const std::vector<std::uint8_t>& z, const MixtureHyper& hyper, RngStream& rng) {
  if (z.empty()) throw ConfigError("update_s needs at least one observation");
  double k = 0.0;
  for (auto zi : z) k += zi;
  const double n = static_cast<double>(z.size());
  return rng.beta(hyper.a_s + k, hyper.b_s + n - k);
}

void eta_step(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& log_lambda,
              EtaLatentState& state, const MixtureHyper& hyper, RngStream& rng, SMode s_mode) {
  const auto n = static_cast<Eigen::Index>(state.size());
  if (y.size() != n || log_lambda.size() != n) throw ConfigError("eta_step: length mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const bool zi = update_z_log(y[i], log_lambda[i], state.log_eta2[i], state.s, rng);
    state.z[ui] = zi ? 1 : 0;
    state.log_eta2[i] = update_eta2_log(y[i], zi, log_lambda[i], state.log_u[i], rng);
    const Latents lat = update_latents_log(state.log_eta2[i], hyper, rng);
    state.v[i] = lat.v;
    state.w[i] = lat.w;
    state.log_u[i] = lat.log_u;
  }
  if (s_mode == SMode::Free) state.s = update_s(state.z, hyper, rng);
}

}  // namespace rsb
