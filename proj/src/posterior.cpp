#include "rsb/posterior.hpp"

#include <algorithm>
#include <cmath>

#include "rsb/dataset.hpp"
#include "rsb/errors.hpp"

namespace rsb {

Eigen::VectorXd CountDataset::offset_or_zero() const {
  return has_offset() ? offset : Eigen::VectorXd::Zero(n());
}

Eigen::MatrixXd CountDataset::design(bool intercept) const {
  if (!intercept) return X;
  Eigen::MatrixXd D(n(), X.cols() + 1);
  D.col(0).setOnes();
  D.rightCols(X.cols()) = X;
  return D;
}

void CountDataset::validate() const {
  if (n() == 0) throw ConfigError("dataset has no rows");
  if (X.rows() != n() && X.size() != 0) throw ConfigError("covariate rows do not match counts");
  if (offset.size() != 0 && offset.size() != n()) throw ConfigError("offset length does not match counts");
  if (coords.size() != 0 && (coords.rows() != n() || coords.cols() != 2))
    throw ConfigError("coordinates must be n x 2");
  for (Eigen::Index i = 0; i < n(); ++i)
    if (!(y[i] >= 0.0) || std::floor(y[i]) != y[i])
      throw ConfigError("count at row " + std::to_string(i) + " is not a nonnegative integer");
  if (!X.allFinite() || !offset.allFinite() || !coords.allFinite()) throw ConfigError("non-finite covariate values");
}

void ChainConfig::validate() const {
  if (iterations == 0) throw ConfigError("iterations must be positive");
  if (thin == 0) throw ConfigError("thin must be positive");
}

PosteriorDraws::PosteriorDraws(std::vector<std::string> names, std::size_t rows)
    : names_(std::move(names)),
      values_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(names_.size()))) {
  for (std::size_t j = 0; j < names_.size(); ++j) index_[names_[j]] = static_cast<Eigen::Index>(j);
}

Eigen::Index PosteriorDraws::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("no parameter named " + name);
  return it->second;
}

Eigen::VectorXd PosteriorDraws::column(const std::string& name) const { return values_.col(index(name)); }

double PosteriorDraws::mean(const std::string& name) const { return values_.col(index(name)).mean(); }

double PosteriorDraws::quantile(const std::string& name, double q) const {
  const Eigen::VectorXd c = column(name);
  return sample_quantile(std::vector<double>(c.data(), c.data() + c.size()), q);
}

std::vector<ParamSummary> PosteriorDraws::summary() const {
  std::vector<ParamSummary> out;
  out.reserve(names_.size());
  for (std::size_t j = 0; j < names_.size(); ++j) {
    const auto col = values_.col(static_cast<Eigen::Index>(j));
    std::vector<double> v(col.data(), col.data() + col.size());
    const double m = col.mean();
    const double sd = v.size() > 1 ? std::sqrt((col.array() - m).square().sum() / static_cast<double>(v.size() - 1)) : 0.0;
    out.push_back({names_[j], m, sd, sample_quantile(v, 0.5), sample_quantile(v, 0.025), sample_quantile(v, 0.975)});
  }
  return out;
}

double sample_quantile(std::vector<double> v, double q) {
  if (v.empty()) throw ConfigError("quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double batch_means_se(std::span<const double> x, std::size_t batches) {
  const std::size_t len = x.size() / batches;
  if (len < 2) throw ConfigError("too few draws for batch means");
  double grand = 0.0;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < len; ++i) means[b] += x[b * len + i];
    means[b] /= static_cast<double>(len);
    grand += means[b];
  }
  grand /= static_cast<double>(batches);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  return std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
}

std::string indexed(const std::string& base, Eigen::Index i) { return base + "[" + std::to_string(i) + "]"; }

}  // namespace rsb
