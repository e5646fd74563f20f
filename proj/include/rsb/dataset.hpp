#pragma once

#include <Eigen/Dense>

namespace rsb {

// Counts with covariates and optional offsets and planar coordinates.
// Counts are held as doubles; they must be nonnegative integers.
struct CountDataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;       // n x p covariates, no intercept column
  Eigen::VectorXd offset;  // empty or length n
  Eigen::MatrixXd coords;  // empty or n x 2

  Eigen::Index n() const { return y.size(); }
  Eigen::Index p() const { return X.cols(); }
  bool has_offset() const { return offset.size() > 0; }
  bool has_coords() const { return coords.rows() > 0; }

  Eigen::VectorXd offset_or_zero() const;
  // Covariates with a leading column of ones when requested.
  Eigen::MatrixXd design(bool intercept) const;
  void validate() const;
};

}  // namespace rsb
