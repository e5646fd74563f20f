#include "rsb/pg_augment.hpp"

#include <cmath>
#include <cstdio>

#include "rsb/errors.hpp"
#include "rsb/polya_gamma.hpp"

namespace rsb {

GaussianPrior GaussianPrior::isotropic(Eigen::Index dim, double variance) {
  if (!(variance > 0.0)) throw ConfigError("prior variance must be positive");
  return {Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Identity(dim, dim) / variance};
}

GaussianPrior GaussianPrior::from_covariance(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success || cov.rows() != mean.size())
    throw ConfigError("prior covariance must be positive definite and match the mean");
  return {mean, llt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()))};
}

double update_omega(double y, double psi, double delta, RngStream& rng) {
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  return pg_sample(y + delta, psi, rng);
}

Eigen::VectorXd draw_gaussian_canonical(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b, RngStream& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) {
    Eigen::MatrixXd Qj = Q;
    Qj.diagonal().array() += 1e-8 * std::max(1.0, Q.diagonal().cwiseAbs().maxCoeff());
    llt.compute(Qj);
    if (llt.info() != Eigen::Success) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
      const auto& ev = es.eigenvalues();
      char buf[160];
      std::snprintf(buf, sizeof buf, "precision not positive definite after jitter (eigenvalue range %.3g .. %.3g)",
                    ev.minCoeff(), ev.maxCoeff());
      throw NumericError(buf);
    }
  }
  const Eigen::VectorXd mean = llt.solve(b);
  Eigen::VectorXd z(b.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = rng.normal();
  // L L^T = Q, so L^{-T} z has covariance Q^{-1}
  return mean + llt.matrixU().solve(z);
}

Eigen::VectorXd gaussian_coeff_update(const Eigen::Ref<const Eigen::MatrixXd>& A,
                                      const Eigen::Ref<const Eigen::VectorXd>& omega,
                                      const Eigen::Ref<const Eigen::VectorXd>& kappa,
                                      const Eigen::Ref<const Eigen::VectorXd>& fixed, const GaussianPrior& prior,
                                      RngStream& rng) {
  const Eigen::Index n = A.rows(), q = A.cols();
  if (omega.size() != n || kappa.size() != n || fixed.size() != n) throw ConfigError("coefficient update: length mismatch");
  if (prior.mean.size() != q || prior.precision.rows() != q) throw ConfigError("coefficient update: prior dimension mismatch");
  Eigen::MatrixXd Q = prior.precision;
  Q.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose() * omega.cwiseSqrt().asDiagonal());
  Q.triangularView<Eigen::StrictlyUpper>() = Q.transpose();
  Eigen::VectorXd b = prior.precision * prior.mean;
  b.noalias() += A.transpose() * (kappa - omega.cwiseProduct(fixed));
  return draw_gaussian_canonical(Q, b, rng);
}

Eigen::VectorXd gaussian_coeff_update(const Eigen::Ref<const Eigen::MatrixXd>& A,
                                      const Eigen::Ref<const Eigen::VectorXd>& omega,
                                      const Eigen::Ref<const Eigen::VectorXd>& kappa,
                                      const Eigen::Ref<const Eigen::VectorXd>& eta, double delta,
                                      const GaussianPrior& prior, RngStream& rng) {
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  const Eigen::VectorXd fixed = eta.array().log() - std::log(delta);
  return gaussian_coeff_update(A, omega, kappa, fixed, prior, rng);
}

}  // namespace rsb
