#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "rsb/posterior.hpp"

namespace testing {

inline double sample_mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double sample_var(std::span<const double> x) {
  const double m = sample_mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// sup |F_n - F| for a continuous reference cdf
inline double ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

// Agreement of an iid sample's mean with a correlated chain's mean, in
// standard errors of the difference.
inline double geweke_z(std::span<const double> iid, std::span<const double> chain) {
  const double se_iid = std::sqrt(sample_var(iid) / static_cast<double>(iid.size()));
  const double se_chain = rsb::batch_means_se(chain, 100);
  return (sample_mean(iid) - sample_mean(chain)) / std::sqrt(se_iid * se_iid + se_chain * se_chain);
}

// Collects named test-function values for the two Geweke simulators.
struct GewekeTable {
  std::vector<std::vector<double>> forward, chain;
  explicit GewekeTable(std::size_t k) : forward(k), chain(k) {}
  void add_forward(const std::vector<double>& g) {
    for (std::size_t j = 0; j < g.size(); ++j) forward[j].push_back(g[j]);
  }
  void add_chain(const std::vector<double>& g) {
    for (std::size_t j = 0; j < g.size(); ++j) chain[j].push_back(g[j]);
  }
  double max_abs_z() const {
    double m = 0.0;
    for (std::size_t j = 0; j < forward.size(); ++j) m = std::max(m, std::fabs(geweke_z(forward[j], chain[j])));
    return m;
  }
  std::vector<double> z_scores() const {
    std::vector<double> z;
    for (std::size_t j = 0; j < forward.size(); ++j) z.push_back(geweke_z(forward[j], chain[j]));
    return z;
  }
};

}  // namespace testing
