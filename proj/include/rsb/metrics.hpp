#pragma once

#include <Eigen/Dense>
#include <span>

namespace rsb {

double interval_score(double l, double u, double x, double alpha);
double mse(std::span<const double> estimates, std::span<const double> truth);
// 2 * mean deviance - deviance at the posterior mean, with deviance = -2 loglik.
double dic(std::span<const double> loglik_draws, double loglik_at_mean);
double effective_parameters(std::span<const double> loglik_draws, double loglik_at_mean);
bool covers(double l, double u, double x);

struct MetricReport {
  Eigen::VectorXd mse;             // per coefficient squared error
  Eigen::VectorXd interval_score;  // per coefficient at alpha
  Eigen::VectorXd coverage;        // 1 if the interval covers the truth
  double mean_mse = 0.0;
  double mean_interval_score = 0.0;
};

// Columns of `estimates`, `lower`, `upper` correspond to the truth entries.
MetricReport coefficient_report(const Eigen::VectorXd& estimate, const Eigen::VectorXd& lower,
                                const Eigen::VectorXd& upper, const Eigen::VectorXd& truth, double alpha = 0.05);

}  // namespace rsb
