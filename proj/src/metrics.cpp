#include "rsb/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "rsb/errors.hpp"

namespace rsb {

double interval_score(double l, double u, double x, double alpha) {
  if (l > u) throw std::domain_error("interval_score: lower bound exceeds upper bound");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("interval_score: alpha must lie in (0,1)");
  double s = u - l;
  if (x < l) s += 2.0 / alpha * (l - x);
  if (x > u) s += 2.0 / alpha * (x - u);
  return s;
}

double mse(std::span<const double> estimates, std::span<const double> truth) {
  if (estimates.size() != truth.size() || estimates.empty()) throw ConfigError("mse: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) s += (estimates[i] - truth[i]) * (estimates[i] - truth[i]);
  return s / static_cast<double>(truth.size());
}

namespace {

double mean_deviance(std::span<const double> loglik_draws) {
  if (loglik_draws.empty()) throw ConfigError("dic: no draws");
  double m = 0.0;
  for (double l : loglik_draws) m += l;
  return -2.0 * m / static_cast<double>(loglik_draws.size());
}

}  // namespace

double dic(std::span<const double> loglik_draws, double loglik_at_mean) {
  return 2.0 * mean_deviance(loglik_draws) + 2.0 * loglik_at_mean;
}

double effective_parameters(std::span<const double> loglik_draws, double loglik_at_mean) {
  return mean_deviance(loglik_draws) + 2.0 * loglik_at_mean;
}

bool covers(double l, double u, double x) { return l <= x && x <= u; }

MetricReport coefficient_report(const Eigen::VectorXd& estimate, const Eigen::VectorXd& lower,
                                const Eigen::VectorXd& upper, const Eigen::VectorXd& truth, double alpha) {
  const Eigen::Index p = truth.size();
  if (estimate.size() != p || lower.size() != p || upper.size() != p) throw ConfigError("metric report: length mismatch");
  MetricReport r;
  r.mse = (estimate - truth).array().square();
  r.interval_score.resize(p);
  r.coverage.resize(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    r.interval_score[k] = interval_score(lower[k], upper[k], truth[k], alpha);
    r.coverage[k] = covers(lower[k], upper[k], truth[k]) ? 1.0 : 0.0;
  }
  r.mean_mse = r.mse.mean();
  r.mean_interval_score = r.interval_score.mean();
  return r;
}

}  // namespace rsb
