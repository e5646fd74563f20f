#include "rsb/oracle.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <vector>

#include "rsb/errors.hpp"
#include "rsb/glm.hpp"
#include "rsb/special.hpp"

namespace rsb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log of the mixed pmf of one count value, tabulated on a uniform z grid.
class MixedTable {
 public:
  MixedTable(double y, double zlo, double zhi, double step, const ObservationModel& m) {
    const auto len = static_cast<std::size_t>(std::ceil((zhi - zlo) / step)) + 4;
    std::vector<double> v(len);
    z0_ = zlo - step;
    for (std::size_t j = 0; j < len; ++j) v[j] = marginal_count_log_pmf(y, z0_ + step * static_cast<double>(j), m.mixing, m.kernel);
    zmax_ = z0_ + step * static_cast<double>(len - 1);
    spline_ = std::make_unique<boost::math::interpolators::cardinal_cubic_b_spline<double>>(v.data(), v.size(), z0_, step);
  }
  double operator()(double z) const {
    if (z < z0_ || z > zmax_) throw NumericError("oracle table queried outside its range");
    return (*spline_)(z);
  }

 private:
  double z0_, zmax_;
  std::unique_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

double combine(const std::vector<double>& lp, const std::vector<double>& lm, const ObservationModel& m) {
  const std::size_t n = lp.size();
  double total = 0.0;
  switch (m.weight) {
    case ObservationModel::Weight::None:
      for (double v : lp) total += v;
      return total;
    case ObservationModel::Weight::Fixed:
      if (m.s >= 1.0) {
        for (double v : lm) total += v;
        return total;
      }
      for (std::size_t i = 0; i < n; ++i) total += log_add_exp(std::log1p(-m.s) + lp[i], std::log(m.s) + lm[i]);
      return total;
    case ObservationModel::Weight::BetaPrior: {
      // e_k: sum over subsets of size k of prod M (in subset) prod P (outside)
      std::vector<double> e(n + 1, kNegInf);
      e[0] = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i + 2; k-- > 0;) {
          const double keep = e[k] + lp[i];
          const double take = k > 0 ? e[k - 1] + lm[i] : kNegInf;
          e[k] = log_add_exp(keep, take);
        }
      std::vector<double> terms(n + 1);
      const double lb0 = log_beta_fn(m.a_s, m.b_s);
      for (std::size_t k = 0; k <= n; ++k)
        terms[k] = e[k] + log_beta_fn(m.a_s + static_cast<double>(k), m.b_s + static_cast<double>(n - k)) - lb0;
      return log_sum_exp(terms);
    }
  }
  return kNegInf;
}

struct Box {
  Eigen::VectorXd center;
  Eigen::VectorXd half;
  Eigen::Index nodes;
};

struct GridMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double edge_drop;   // max log density on the box edge minus the global max
  double truncation;  // mean shift from mass beyond the box, exponential-tail estimate
};

class Evaluator {
 public:
  Evaluator(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::VectorXd& off,
            const ObservationModel& m, const GaussianPrior& prior, const Eigen::VectorXd& tilt)
      : y_(y), X_(X), off_(off), m_(m), prior_(prior), tilt_(tilt) {}

  void build_tables(const Box& box, double step) {
    tables_.clear();
    if (m_.weight == ObservationModel::Weight::None) return;
    std::map<double, std::pair<double, double>> range;
    for (Eigen::Index i = 0; i < y_.size(); ++i) {
      double reach = 0.0;
      for (Eigen::Index k = 0; k < X_.cols(); ++k) reach += std::fabs(X_(i, k)) * box.half[k];
      const double c = X_.row(i).dot(box.center) + off_[i];
      auto [it, fresh] = range.try_emplace(y_[i], c - reach, c + reach);
      if (!fresh) {
        it->second.first = std::min(it->second.first, c - reach);
        it->second.second = std::max(it->second.second, c + reach);
      }
    }
    for (const auto& [yv, r] : range) tables_.emplace(yv, MixedTable(yv, r.first, r.second, step, m_));
  }

  double log_post(const Eigen::VectorXd& beta) {
    const Eigen::Index n = y_.size();
    lp_.resize(static_cast<std::size_t>(n));
    lm_.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z = X_.row(i).dot(beta) + off_[i];
      lp_[static_cast<std::size_t>(i)] = m_.kernel.log_pmf(y_[i], z);
      if (m_.weight != ObservationModel::Weight::None) lm_[static_cast<std::size_t>(i)] = tables_.at(y_[i])(z);
    }
    const Eigen::VectorXd d = beta - prior_.mean;
    double v = combine(lp_, lm_, m_) - 0.5 * d.dot(prior_.precision * d);
    if (tilt_.size()) v += tilt_.dot(beta);
    return v;
  }

  // grid moments using every `stride`-th node
  GridMoments moments(const Box& box, const std::vector<double>& logp, Eigen::Index stride) const {
    const Eigen::Index d = box.center.size(), N = box.nodes;
    GridMoments g{Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, d), kNegInf, 0.0};
    double mx = kNegInf;
    for (double v : logp) mx = std::max(mx, v);
    double wsum = 0.0;
    Eigen::VectorXd b(d);
    const Eigen::Index total = d == 1 ? N : N * N;
    for (Eigen::Index idx = 0; idx < total; ++idx) {
      const Eigen::Index i0 = idx % N, i1 = idx / N;
      if (i0 % stride || i1 % stride) continue;
      node(box, idx, b);
      const double w = std::exp(logp[static_cast<std::size_t>(idx)] - mx);
      wsum += w;
      g.mean += w * b;
      g.cov += w * b * b.transpose();
      const bool edge = i0 == 0 || i0 == N - 1 || (d == 2 && (i1 == 0 || i1 == N - 1));
      if (edge) g.edge_drop = std::max(g.edge_drop, logp[static_cast<std::size_t>(idx)] - mx);
    }
    g.mean /= wsum;
    g.cov = g.cov / wsum - g.mean * g.mean.transpose();

    // continue each face outward with the decay rate of its last grid step
    for (Eigen::Index idx = 0; idx < total; ++idx) {
      const Eigen::Index i[2] = {idx % N, idx / N};
      if (i[0] % stride || i[1] % stride) continue;
      node(box, idx, b);
      const double w = std::exp(logp[static_cast<std::size_t>(idx)] - mx);
      for (Eigen::Index k = 0; k < d; ++k) {
        if (i[k] != 0 && i[k] != N - 1) continue;
        const Eigen::Index step = (i[k] == 0 ? stride : -stride) * (k == 0 ? 1 : N);
        const double h = 2.0 * box.half[k] * static_cast<double>(stride) / static_cast<double>(N - 1);
        const double slope = (logp[static_cast<std::size_t>(idx + step)] - logp[static_cast<std::size_t>(idx)]) / h;
        if (!(slope > 0.0)) {
          if (w > 0.0) g.truncation = std::numeric_limits<double>::infinity();
          continue;
        }
        g.truncation += w / (slope * h) / wsum * (std::fabs(b[k] - g.mean[k]) + 1.0 / slope);
      }
    }
    return g;
  }

  static void node(const Box& box, Eigen::Index idx, Eigen::VectorXd& b) {
    const Eigen::Index N = box.nodes;
    const Eigen::Index i[2] = {idx % N, idx / N};
    for (Eigen::Index k = 0; k < box.center.size(); ++k)
      b[k] = box.center[k] - box.half[k] + 2.0 * box.half[k] * static_cast<double>(i[k]) / static_cast<double>(N - 1);
  }

  std::vector<double> evaluate(const Box& box) {
    const Eigen::Index d = box.center.size(), N = box.nodes;
    const Eigen::Index total = d == 1 ? N : N * N;
    std::vector<double> out(static_cast<std::size_t>(total));
    Eigen::VectorXd b(d);
    for (Eigen::Index idx = 0; idx < total; ++idx) {
      node(box, idx, b);
      out[static_cast<std::size_t>(idx)] = log_post(b);
    }
    return out;
  }

 private:
  const Eigen::VectorXd& y_;
  const Eigen::MatrixXd& X_;
  const Eigen::VectorXd& off_;
  const ObservationModel& m_;
  const GaussianPrior& prior_;
  const Eigen::VectorXd& tilt_;
  std::map<double, MixedTable> tables_;
  std::vector<double> lp_, lm_;
};

}  // namespace

double oracle_log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& log_rate, const ObservationModel& model) {
  std::vector<double> lp(static_cast<std::size_t>(y.size())), lm(lp.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    lp[static_cast<std::size_t>(i)] = model.kernel.log_pmf(y[i], log_rate[i]);
    if (model.weight != ObservationModel::Weight::None)
      lm[static_cast<std::size_t>(i)] = marginal_count_log_pmf(y[i], log_rate[i], model.mixing, model.kernel);
  }
  return combine(lp, lm, model);
}

OracleResult quadrature_posterior_oracle(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                          const Eigen::VectorXd& offset, const ObservationModel& model,
                                          const GaussianPrior& prior, const OracleOptions& opts) {
  const Eigen::Index d = X.cols();
  if (d < 1 || d > 2) throw ConfigError("quadrature oracle supports one or two coefficients");
  if (X.rows() != y.size()) throw ConfigError("oracle: design rows do not match counts");
  const Eigen::VectorXd off = offset.size() ? offset : Eigen::VectorXd::Zero(y.size());
  if (opts.tilt.size() && opts.tilt.size() != d) throw ConfigError("oracle: tilt has the wrong dimension");
  if (model.weight == ObservationModel::Weight::Fixed && !(model.s >= 0.0 && model.s <= 1.0))
    throw ConfigError("oracle: mixture weight must lie in [0,1]");

  Evaluator ev(y, X, off, model, prior, opts.tilt);
  Eigen::VectorXd start = Eigen::VectorXd::Zero(d);
  start = poisson_newton(X, y, off, start, &prior).beta;

  Box box{start, Eigen::VectorXd::Constant(d, opts.coarse_half_width), d == 1 ? 2401 : 241};
  ev.build_tables(box, 0.05);
  std::vector<double> logp = ev.evaluate(box);
  GridMoments g = ev.moments(box, logp, 1);

  OracleResult res;
  Eigen::Index nodes = opts.nodes | 1;
  double width = opts.half_width_sd;
  for (int round = 0; round < opts.max_rounds; ++round) {
    Box fine{g.mean, (width * g.cov.diagonal().cwiseMax(1e-300).cwiseSqrt()).eval(), nodes};
    ev.build_tables(fine, opts.spline_step);
    logp = ev.evaluate(fine);
    const GridMoments gf = ev.moments(fine, logp, 1);
    const GridMoments gc = ev.moments(fine, logp, 2);
    res.mean = gf.mean;
    res.cov = gf.cov;
    const bool edges_ok = gf.edge_drop < -40.0 || gf.truncation < 0.1 * opts.target_error;
    res.error = (gf.mean - gc.mean).cwiseAbs().maxCoeff() + (gf.edge_drop < -40.0 ? 0.0 : gf.truncation);
    res.grid_points = d == 1 ? nodes : nodes * nodes;
    const bool moved = ((gf.mean - g.mean).array().abs() > 0.5 * fine.half.array() / width).any();
    g = gf;
    if (edges_ok && !moved && res.error < opts.target_error) return res;
    if (!edges_ok) {
      width *= 1.5;
      nodes = 2 * nodes - 1;
    } else if (!moved) {
      nodes = 2 * nodes - 1;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "oracle error budget exceeded (estimated %.3g)", res.error);
  throw QuadratureError(buf, res.error);
}

double zero_count_origin_probability(double lambda, double eps, const RsbParams& p, double s) {
  if (!(lambda > 0.0) || !(eps > 0.0) || !(s > 0.0 && s <= 1.0)) throw ConfigError("invalid origin-probability inputs");
  const double ll = std::log(lambda);
  auto f = [&](double t) { return rsb_log_pdf_t(t, p) - std::exp(ll + t); };
  QuadratureOptions below;
  below.upper = std::log(eps);
  below.hint = std::min(below.upper, -ll);
  QuadratureOptions all;
  all.hint = -ll;
  const double log_part = std::log(s) + integrate_exp(f, below).log_value;
  const double log_total = log_add_exp(s < 1.0 ? std::log1p(-s) - lambda : kNegInf, std::log(s) + integrate_exp(f, all).log_value);
  double log_num = log_part;
  if (eps > 1.0 && s < 1.0) log_num = log_add_exp(log_num, std::log1p(-s) - lambda);
  return std::exp(log_num - log_total);
}

}  // namespace rsb
