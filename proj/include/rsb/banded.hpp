#pragma once

#include <Eigen/Dense>

namespace rsb {

// Symmetric positive definite matrix with lower bandwidth `bw`, stored as
// band(i, d) = M(i, i - d) for d = 0..bw.
class BandedSpd {
 public:
  BandedSpd(Eigen::Index n, Eigen::Index bw);

  Eigen::Index size() const { return n_; }
  Eigen::Index bandwidth() const { return bw_; }
  double& operator()(Eigen::Index i, Eigen::Index j);  // requires 0 <= i - j <= bw
  double get(Eigen::Index i, Eigen::Index j) const;
  Eigen::MatrixXd dense() const;

  // In-place Cholesky factor; returns false if not positive definite.
  bool factorize();
  Eigen::VectorXd solve_lower(const Eigen::VectorXd& b) const;      // L x = b
  Eigen::VectorXd solve_upper(const Eigen::VectorXd& b) const;      // L^T x = b
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  Eigen::Index n_, bw_;
  Eigen::MatrixXd band_;
  bool factored_ = false;
};

}  // namespace rsb
