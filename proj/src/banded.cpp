#include "rsb/banded.hpp"

#include <algorithm>
#include <cmath>

#include "rsb/errors.hpp"

namespace rsb {

BandedSpd::BandedSpd(Eigen::Index n, Eigen::Index bw) : n_(n), bw_(bw), band_(Eigen::MatrixXd::Zero(n, bw + 1)) {
  if (n <= 0 || bw < 0) throw ConfigError("banded matrix needs n > 0 and bandwidth >= 0");
}

double& BandedSpd::operator()(Eigen::Index i, Eigen::Index j) {
  const Eigen::Index d = i - j;
  if (d < 0 || d > bw_) throw ConfigError("banded index outside the band");
  return band_(i, d);
}

double BandedSpd::get(Eigen::Index i, Eigen::Index j) const {
  if (j > i) std::swap(i, j);
  const Eigen::Index d = i - j;
  return d > bw_ ? 0.0 : band_(i, d);
}

Eigen::MatrixXd BandedSpd::dense() const {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n_, n_);
  for (Eigen::Index i = 0; i < n_; ++i)
    for (Eigen::Index d = 0; d <= std::min(bw_, i); ++d) {
      M(i, i - d) = band_(i, d);
      M(i - d, i) = band_(i, d);
    }
  return M;
}

bool BandedSpd::factorize() {
  for (Eigen::Index j = 0; j < n_; ++j) {
    double diag = band_(j, 0);
    for (Eigen::Index k = std::max<Eigen::Index>(0, j - bw_); k < j; ++k) diag -= band_(j, j - k) * band_(j, j - k);
    if (!(diag > 0.0)) return false;
    const double ljj = std::sqrt(diag);
    band_(j, 0) = ljj;
    for (Eigen::Index i = j + 1; i <= std::min(n_ - 1, j + bw_); ++i) {
      double v = band_(i, i - j);
      for (Eigen::Index k = std::max<Eigen::Index>(0, i - bw_); k < j; ++k) v -= band_(i, i - k) * band_(j, j - k);
      band_(i, i - j) = v / ljj;
    }
  }
  factored_ = true;
  return true;
}

Eigen::VectorXd BandedSpd::solve_lower(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = b;
  for (Eigen::Index i = 0; i < n_; ++i) {
    double v = x[i];
    for (Eigen::Index k = std::max<Eigen::Index>(0, i - bw_); k < i; ++k) v -= band_(i, i - k) * x[k];
    x[i] = v / band_(i, 0);
  }
  return x;
}

Eigen::VectorXd BandedSpd::solve_upper(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = b;
  for (Eigen::Index i = n_ - 1; i >= 0; --i) {
    double v = x[i];
    for (Eigen::Index k = i + 1; k <= std::min(n_ - 1, i + bw_); ++k) v -= band_(k, k - i) * x[k];
    x[i] = v / band_(i, 0);
  }
  return x;
}

Eigen::VectorXd BandedSpd::solve(const Eigen::VectorXd& b) const {
  if (!factored_) throw NumericError("banded solve before factorization");
  return solve_upper(solve_lower(b));
}

}  // namespace rsb
