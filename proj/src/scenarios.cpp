#include "rsb/scenarios.hpp"

#include <cmath>

#include "rsb/errors.hpp"

namespace rsb {

namespace {

constexpr double kOmega1[] = {0.05, 0.1, 0.15, 0.05, 0.1, 0.15, 0.05, 0.1, 0.15};
constexpr double kOmega2[] = {0.0, 0.0, 0.0, 0.05, 0.05, 0.05, 0.1, 0.1, 0.1};
constexpr double kTrendFloor = 0.1;  // scenario 3 draws are Gaussian and can go negative

}  // namespace

void GlmScenario::validate() const {
  if (!(omega1 >= 0.0) || !(omega2 >= 0.0)) throw ConfigError("contamination probabilities must be nonnegative");
  if (structured ? !(2.0 * omega1 + omega2 < 1.0) : !(omega1 + omega2 < 1.0))
    throw ConfigError("contamination probabilities must sum below one");
  if (n < 1) throw ConfigError("scenario needs n >= 1");
}

GlmScenario glm_scenario(int id, double y_o, std::uint64_t seed, bool structured) {
  if (id < 1 || id > 9) throw ConfigError("GLM scenario id must be in 1..9");
  GlmScenario sc;
  sc.id = id;
  sc.omega1 = kOmega1[id - 1];
  sc.omega2 = kOmega2[id - 1];
  sc.y_o = y_o;
  sc.seed = seed;
  sc.structured = structured;
  return sc;
}

Eigen::VectorXd glm_true_beta() {
  Eigen::VectorXd b(6);
  b << 2.0, -0.2, 0.0, 0.3, 0.0, 0.6;
  return b;
}

GlmSimulated gen_glm_scenario(const GlmScenario& sc) {
  sc.validate();
  RngStream rng(sc.seed, 0x676c6d);
  const Eigen::Index n = sc.n, p = 5;
  Eigen::MatrixXd cov(p, p);
  for (Eigen::Index k = 0; k < p; ++k)
    for (Eigen::Index l = 0; l < p; ++l) cov(k, l) = std::pow(0.2, std::abs(static_cast<double>(k - l)));
  const Eigen::MatrixXd L = cov.llt().matrixL();

  GlmSimulated out;
  out.beta = glm_true_beta();
  out.data.X.resize(n, p);
  out.data.y.resize(n);
  out.y_clean.resize(n);
  out.d.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd e(p);
    for (Eigen::Index k = 0; k < p; ++k) e[k] = rng.normal();
    out.data.X.row(i) = (L * e).transpose();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lin = out.beta[0] + out.data.X.row(i).dot(out.beta.tail(p));
    const double ystar = rng.poisson(std::exp(lin));
    double w1 = sc.omega1;
    if (sc.structured) w1 *= 2.0 / (1.0 + std::exp(-0.5 * out.data.X(i, 1) - 0.5 * out.data.X(i, 2)));
    const double u = rng.uniform();
    int d = 0;
    if (u < w1)
      d = 1;
    else if (u < w1 + sc.omega2)
      d = 2;
    out.d[static_cast<std::size_t>(i)] = d;
    out.y_clean[i] = ystar;
    out.data.y[i] = d == 1 ? 0.0 : (d == 2 ? ystar + sc.y_o : ystar);
  }
  return out;
}

double trend_truth(int id, Eigen::Index i, Eigen::Index n) {
  const double x = static_cast<double>(i);
  switch (id) {
    case 1:
      return 20.0;
    case 2:
      return 25.0 - 15.0 * (x >= 20) + 25.0 * (x >= 40) - 20.0 * (x >= 60);
    case 4: {
      const double t = 4.0 * x / static_cast<double>(n) - 2.0;
      return 20.0 + 10.0 * std::sin(t) + 20.0 * std::exp(-30.0 * t * t);
    }
    default:
      throw ConfigError("trend scenario " + std::to_string(id) + " has no closed-form truth");
  }
}

TrendSimulated gen_trend_scenario(int id, Eigen::Index n, RngStream& rng, bool contaminate) {
  if (id < 1 || id > 4) throw ConfigError("trend scenario id must be in 1..4");
  if (n < 4) throw ConfigError("trend scenario needs n >= 4");
  TrendSimulated out;
  out.truth.resize(n);
  if (id == 3) {
    Eigen::MatrixXd S(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) S(j, k) = 100.0 * std::exp(-static_cast<double>((j - k) * (j - k)) / 200.0);
    S.diagonal().array() += 1e-8 * 100.0;
    const Eigen::MatrixXd L = S.llt().matrixL();
    Eigen::VectorXd e(n);
    for (Eigen::Index i = 0; i < n; ++i) e[i] = rng.normal();
    out.truth = (Eigen::VectorXd::Constant(n, 10.0) + L * e).cwiseMax(kTrendFloor);
  } else {
    // observations are indexed 1..n
    for (Eigen::Index i = 0; i < n; ++i) out.truth[i] = trend_truth(id, i + 1, n);
  }
  out.y.resize(n);
  out.y_clean.resize(n);
  out.d.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.y_clean[i] = rng.poisson(out.truth[i]);
    out.y[i] = out.y_clean[i];
    if (!contaminate) continue;
    const double u = rng.uniform();
    if (u < 0.05) {
      out.y[i] += 20.0;
      out.d[static_cast<std::size_t>(i)] = 2;
    } else if (u < 0.10) {
      out.y[i] = 0.0;
      out.d[static_cast<std::size_t>(i)] = 1;
    }
  }
  return out;
}

}  // namespace rsb
