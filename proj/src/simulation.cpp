#include "rsb/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rsb/errors.hpp"
#include "rsb/glm.hpp"
#include "rsb/metrics.hpp"
#include "rsb/oracle.hpp"
#include "rsb/scenarios.hpp"
#include "rsb/spatial.hpp"
#include "rsb/trend.hpp"

namespace rsb {

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

constexpr double kZ975 = 1.959963984540054;

MethodMetrics slope_metrics(const Eigen::VectorXd& est, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                            const Eigen::VectorXd& truth) {
  const Eigen::Index p = truth.size() - 1;
  const MetricReport r = coefficient_report(est.tail(p), lo.tail(p), hi.tail(p), truth.tail(p));
  return {r.mean_mse, r.mean_interval_score, r.coverage.mean()};
}

MethodMetrics draws_metrics(const PosteriorDraws& d, const Eigen::VectorXd& truth) {
  const Eigen::Index q = truth.size();
  Eigen::VectorXd est(q), lo(q), hi(q);
  for (Eigen::Index j = 0; j < q; ++j) {
    est[j] = d.mean(indexed("beta", j));
    lo[j] = d.quantile(indexed("beta", j), 0.025);
    hi[j] = d.quantile(indexed("beta", j), 0.975);
  }
  return slope_metrics(est, lo, hi, truth);
}

}  // namespace

std::vector<ReplicationRecord> run_glm_replications(const ReplicationConfig& config) {
  config.chain.validate();
  std::vector<ReplicationRecord> out(config.replications);
  parallel_for(config.replications, config.workers, [&](std::size_t rep) {
    RngStream rng(config.seed, rep);
    const GlmSimulated sim = gen_glm_scenario(glm_scenario(config.scenario, config.y_o, rng.next_u64(), config.structured));
    ReplicationRecord rec;
    rec.rep = rep;

    GlmConfig gc;
    gc.chain = config.chain;
    gc.path = BetaPath::IndependentMH;
    RngStream r1 = rng.split(1);
    const PosteriorDraws rsb = fit_glm_rsb(sim.data, gc, r1);
    rec.rsb = draws_metrics(rsb, sim.beta);
    double det = 0.0;
    int shifted = 0;
    for (std::size_t i = 0; i < sim.d.size(); ++i)
      if (sim.d[i] == 2) {
        det += rsb.mean(indexed("z", static_cast<Eigen::Index>(i)));
        ++shifted;
      }
    rec.outlier_detection = shifted ? det / shifted : 0.0;

    const MleResult mle = poisson_mle(sim.data);
    rec.pr = slope_metrics(mle.beta, mle.beta - kZ975 * mle.se, mle.beta + kZ975 * mle.se, sim.beta);

    PoissonGammaConfig pc;
    pc.chain = config.chain;
    RngStream r2 = rng.split(2);
    rec.pg = draws_metrics(fit_poisson_gamma(sim.data, pc, r2), sim.beta);
    out[rep] = rec;
  });
  return out;
}

PairedComparison paired_comparison(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw ConfigError("paired comparison needs matching samples of size >= 2");
  const double n = static_cast<double>(a.size());
  PairedComparison pc;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pc.mean_a += a[i] / n;
    pc.mean_b += b[i] / n;
  }
  pc.diff = pc.mean_a - pc.mean_b;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i] - pc.diff) * (a[i] - b[i] - pc.diff);
  pc.diff_se = std::sqrt(ss / (n - 1.0) / n);
  return pc;
}

TrendComparison compare_trend(int scenario, Eigen::Index n, std::uint64_t seed, const ChainConfig& chain) {
  RngStream rng(seed, 0x7472);
  const TrendSimulated sim = gen_trend_scenario(scenario, n, rng);
  TrendConfig tc;
  tc.chain = chain;
  tc.record_latent = false;
  auto rmse = [&](const PosteriorDraws& d) {
    const Eigen::VectorXd med = trend_median_rate(d, n);
    return std::sqrt((med - sim.truth).squaredNorm() / static_cast<double>(n));
  };
  TrendComparison out;
  RngStream r1 = rng.split(1);
  out.rmse_rsb = rmse(fit_trend(sim.y, tc, r1));
  tc.error = ErrorModel::Unit;
  RngStream r2 = rng.split(2);
  out.rmse_unit = rmse(fit_trend(sim.y, tc, r2));
  return out;
}

SpatialSimulated gen_spatial_synthetic(Eigen::Index n, std::uint64_t seed, Eigen::Index cluster, double shift) {
  if (cluster > n) throw ConfigError("outlier cluster larger than the data");
  RngStream rng(seed, 0x73706174);
  SpatialSimulated out;
  out.beta.resize(3);
  out.beta << 1.0, 0.4, -0.3;
  CountDataset& d = out.clean;
  d.coords.resize(n, 2);
  d.X.resize(n, 2);
  d.offset.resize(n);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.coords(i, 0) = rng.uniform();
    d.coords(i, 1) = rng.uniform();
    d.X(i, 0) = rng.normal();
    d.X(i, 1) = rng.normal();
    d.offset[i] = std::log(0.5 + 1.5 * rng.uniform());
  }
  // site effects from the full process with variance 0.25 and bandwidth 0.15
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      K(i, j) = K(j, i) = 0.25 * spatial_correlation((d.coords.row(i) - d.coords.row(j)).squaredNorm(), 0.15);
  K.diagonal().array() += 1e-6;
  const Eigen::MatrixXd L = K.llt().matrixL();
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e[i] = rng.normal();
  out.xi = L * e;
  for (Eigen::Index i = 0; i < n; ++i)
    d.y[i] = rng.poisson(std::exp(d.offset[i] + out.beta[0] + d.X.row(i).dot(out.beta.tail(2)) + out.xi[i]));

  out.data = d;
  const auto centre = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(n)));
  std::vector<std::pair<double, Eigen::Index>> dist;
  for (Eigen::Index i = 0; i < n; ++i) dist.emplace_back((d.coords.row(i) - d.coords.row(centre)).squaredNorm(), i);
  std::sort(dist.begin(), dist.end());
  for (Eigen::Index k = 0; k < cluster; ++k) {
    out.outlier_sites.push_back(dist[static_cast<std::size_t>(k)].second);
    out.data.y[dist[static_cast<std::size_t>(k)].second] += shift;
  }
  return out;
}

SpatialComparison compare_spatial(std::uint64_t seed, Eigen::Index n, Eigen::Index M, const ChainConfig& chain) {
  const SpatialSimulated sim = gen_spatial_synthetic(n, seed);
  SpatialConfig sc;
  sc.chain = chain;
  sc.M = M;
  RngStream rng(seed, 0x666974);
  auto centred_xi = [&](const PosteriorDraws& d) {
    Eigen::VectorXd xi(n);
    for (Eigen::Index i = 0; i < n; ++i) xi[i] = d.mean(indexed("xi", i));
    return Eigen::VectorXd(xi.array() - xi.mean());
  };
  SpatialComparison out;
  RngStream r1 = rng.split(1);
  const PosteriorDraws rsb = fit_spatial(sim.data, sc, r1);
  out.h_acceptance = rsb.diagnostics.at("h_acceptance_rate");
  out.dic_rsb = spatial_dic(rsb, sim.data);
  sc.error = ErrorModel::Unit;
  sc.record_latent = false;
  RngStream r2 = rng.split(2);
  const PosteriorDraws unit = fit_spatial(sim.data, sc, r2);
  out.dic_unit = spatial_dic(unit, sim.data);
  RngStream r3 = rng.split(3);
  const PosteriorDraws clean = fit_spatial(sim.clean, sc, r3);
  const Eigen::VectorXd xr = centred_xi(rsb), xu = centred_xi(unit), xc = centred_xi(clean);
  for (Eigen::Index i : sim.outlier_sites) {
    out.dist_rsb += std::fabs(xr[i] - xc[i]);
    out.dist_unit += std::fabs(xu[i] - xc[i]);
  }
  out.dist_rsb /= static_cast<double>(sim.outlier_sites.size());
  out.dist_unit /= static_cast<double>(sim.outlier_sites.size());
  return out;
}

OriginTable origin_probability_table(double s, double a, double a_alt, double b, double lambda_for_ratio) {
  OriginTable t;
  t.lambdas = {0.5, 1.0, 2.0, 4.0, 8.0};
  const RsbParams p{a, b, 0.0}, q{a_alt, b, 0.0};
  for (double l : t.lambdas) t.probabilities.push_back(zero_count_origin_probability(l, 0.01, p, s));
  t.eps = {1e-2, 1e-3, 1e-4};
  for (double e : t.eps)
    t.ratios.push_back(zero_count_origin_probability(lambda_for_ratio, e, p, s) /
                       zero_count_origin_probability(lambda_for_ratio, e, q, s));
  return t;
}

OutlierSweep outlier_sweep(const Eigen::VectorXd& clean, const std::vector<double>& magnitudes, double s,
                           double prior_var) {
  const GaussianPrior prior = GaussianPrior::isotropic(1, prior_var);
  ObservationModel rsb_model{rsb_mixing(RsbParams{}), CountKernel{}, ObservationModel::Weight::Fixed, s, 1.0, 1.0};
  ObservationModel tail_model{grsb_mixing(RsbParams{0.5, 0.5, 1.0}), CountKernel{}, ObservationModel::Weight::Fixed, s,
                              1.0, 1.0};
  auto ones = [](Eigen::Index n) { return Eigen::MatrixXd::Ones(n, 1); };
  const Eigen::Index n = clean.size();
  const Eigen::VectorXd none;
  const double clean_rsb = quadrature_posterior_oracle(clean, ones(n), none, rsb_model, prior).mean[0];
  const double clean_tail = quadrature_posterior_oracle(clean, ones(n), none, tail_model, prior).mean[0];
  OracleOptions tilted;
  tilted.tilt = Eigen::VectorXd::Constant(1, 1.0);  // delta times the outlier's covariate
  const double tilt_tail = quadrature_posterior_oracle(clean, ones(n), none, tail_model, prior, tilted).mean[0];

  OutlierSweep out;
  out.magnitudes = magnitudes;
  for (double m : magnitudes) {
    Eigen::VectorXd full(n + 1);
    full << clean, m;
    const double fr = quadrature_posterior_oracle(full, ones(n + 1), none, rsb_model, prior).mean[0];
    const double ft = quadrature_posterior_oracle(full, ones(n + 1), none, tail_model, prior).mean[0];
    out.dist_clean_rsb.push_back(std::fabs(fr - clean_rsb));
    out.dist_clean_tail.push_back(std::fabs(ft - clean_tail));
    out.dist_tilted_tail.push_back(std::fabs(ft - tilt_tail));
  }
  return out;
}

}  // namespace rsb
