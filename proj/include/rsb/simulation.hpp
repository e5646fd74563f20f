#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "rsb/dataset.hpp"
#include "rsb/posterior.hpp"

namespace rsb {

// Runs fn(0..count-1) on up to `workers` threads (0 = hardware concurrency).
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

struct ReplicationConfig {
  int scenario = 1;
  double y_o = 20.0;
  bool structured = false;
  std::size_t replications = 100;
  std::uint64_t seed = 1;
  ChainConfig chain;
  unsigned workers = 0;
};

struct MethodMetrics {
  double mse = 0.0;             // averaged over the slope coefficients
  double interval_score = 0.0;  // averaged over the slope coefficients
  double coverage = 0.0;
};

struct ReplicationRecord {
  std::size_t rep = 0;
  MethodMetrics rsb, pr, pg;
  double outlier_detection = 0.0;  // mean P(z=1) over injected large counts
};

std::vector<ReplicationRecord> run_glm_replications(const ReplicationConfig& config);

struct PairedComparison {
  double mean_a = 0.0, mean_b = 0.0;
  double diff = 0.0;      // mean of a - b
  double diff_se = 0.0;   // Monte Carlo sd of that mean
};

PairedComparison paired_comparison(const std::vector<double>& a, const std::vector<double>& b);

struct TrendComparison {
  double rmse_rsb = 0.0;
  double rmse_unit = 0.0;
};

// Posterior-median RMSE against the true rate for the RSB and eta = 1 fits.
TrendComparison compare_trend(int scenario, Eigen::Index n, std::uint64_t seed, const ChainConfig& chain);

struct SpatialSimulated {
  CountDataset data;   // contaminated
  CountDataset clean;
  Eigen::VectorXd beta;
  Eigen::VectorXd xi;
  std::vector<Eigen::Index> outlier_sites;
};

SpatialSimulated gen_spatial_synthetic(Eigen::Index n, std::uint64_t seed, Eigen::Index cluster = 5, double shift = 30.0);

struct SpatialComparison {
  double dic_rsb = 0.0, dic_unit = 0.0;
  double dist_rsb = 0.0, dist_unit = 0.0;  // centred xi at outlier sites vs clean fit
  double h_acceptance = 0.0;
};

SpatialComparison compare_spatial(std::uint64_t seed, Eigen::Index n, Eigen::Index M, const ChainConfig& chain);

struct OriginTable {
  std::vector<double> lambdas;
  std::vector<double> probabilities;  // P(eta < eps | y = 0; lambda)
  std::vector<double> eps;
  std::vector<double> ratios;         // a vs a' probability ratio per eps
};

OriginTable origin_probability_table(double s = 0.1, double a = 0.5, double a_alt = 2.0, double b = 0.5,
                                     double lambda_for_ratio = 1.0);

struct OutlierSweep {
  std::vector<double> magnitudes;
  std::vector<double> dist_clean_rsb;    // |E[b|full] - E[b|clean]| under the RSB mixture
  std::vector<double> dist_clean_tail;   // same under the delta = 1 family
  std::vector<double> dist_tilted_tail;  // delta = 1 full posterior vs its tilted limit
};

OutlierSweep outlier_sweep(const Eigen::VectorXd& clean, const std::vector<double>& magnitudes, double s = 0.1,
                           double prior_var = 100.0);

}  // namespace rsb
