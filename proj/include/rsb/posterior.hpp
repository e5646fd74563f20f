#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace rsb {

struct ChainConfig {
  std::size_t iterations = 1500;  // retained draws
  std::size_t burnin = 500;
  std::size_t thin = 1;
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t total_sweeps() const { return burnin + iterations * thin; }
  bool keep(std::size_t sweep) const { return sweep >= burnin && (sweep - burnin + 1) % thin == 0; }
};

struct ParamSummary {
  std::string name;
  double mean, sd, median, q025, q975;
};

class PosteriorDraws {
 public:
  PosteriorDraws() = default;
  PosteriorDraws(std::vector<std::string> names, std::size_t rows);

  const std::vector<std::string>& names() const { return names_; }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::Index rows() const { return values_.rows(); }
  bool has(const std::string& name) const { return index_.count(name) > 0; }
  Eigen::Index index(const std::string& name) const;

  double& at(Eigen::Index row, Eigen::Index col) { return values_(row, col); }
  Eigen::VectorXd column(const std::string& name) const;
  double mean(const std::string& name) const;
  double quantile(const std::string& name, double q) const;
  std::vector<ParamSummary> summary() const;

  std::map<std::string, double> diagnostics;

 private:
  std::vector<std::string> names_;
  std::map<std::string, Eigen::Index> index_;
  Eigen::MatrixXd values_;
};

// Type-7 sample quantile.
double sample_quantile(std::vector<double> v, double q);
// Monte Carlo standard error of the mean from non-overlapping batch means.
double batch_means_se(std::span<const double> x, std::size_t batches = 50);

std::string indexed(const std::string& base, Eigen::Index i);

}  // namespace rsb
