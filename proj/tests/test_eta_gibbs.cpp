#include <catch_amalgamated.hpp>

#include <boost/math/distributions/poisson.hpp>
#include <cmath>
#include <vector>

#include "rsb/distributions.hpp"
#include "rsb/eta_gibbs.hpp"
#include "rsb/special.hpp"
#include "geweke_cases.hpp"
#include "support.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using rsb::RngStream;

namespace {

double po(double y, double mu) { return boost::math::pdf(boost::math::poisson_distribution<double>(mu), y); }

}  // namespace

TEST_CASE("outlier indicator probability", "[eta]") {
  const double ref = 0.5 * po(5, 5) / (0.5 * po(5, 5) + 0.5 * po(5, 1));
  CHECK_THAT(rsb::z_probability(5.0, 1.0, 5.0, 0.5), WithinRel(ref, 1e-12));
  CHECK_THAT(rsb::z_probability(5.0, 1.0, 5.0, 0.5), WithinAbs(0.98283, 1e-5));
  CHECK(rsb::z_probability(5.0, 1.0, 5.0, 0.0) == 0.0);
  CHECK(rsb::z_probability(5.0, 1.0, 5.0, 1.0) == 1.0);
  RngStream rng(31);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE_FALSE(rsb::update_z(3.0, 2.0, 0.1, 0.0, rng));
    REQUIRE(rsb::update_z(3.0, 2.0, 0.1, 1.0, rng));
  }
  // extreme inputs keep finite log weights
  for (double y : {0.0, 1.0, 1e9})
    for (double lam : {1e-12, 1.0, 1e9}) {
      const double p = rsb::z_probability_log(y, std::log(lam), std::log(1e-200), 0.1);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      const double q = rsb::z_probability_log(y, std::log(lam), 900.0, 0.1);
      CHECK(std::isfinite(q));
    }
}

TEST_CASE("eta2 conditional", "[eta]") {
  RngStream rng(32);
  const int n = 100000;
  std::vector<double> a(n), b(n), c(n);
  for (int i = 0; i < n; ++i) {
    a[i] = rsb::update_eta2(7.0, false, 3.0, 2.0, rng);
    b[i] = rsb::update_eta2(4.0, true, 2.0, 3.0, rng);
    c[i] = rsb::update_eta2(0.0, true, 1.5, 0.5, rng);
  }
  CHECK(std::fabs(testing::sample_mean(a) - 0.5) < 4.0 * 0.5 / std::sqrt(n));
  CHECK(std::fabs(testing::sample_mean(b) - 1.0) < 4.0 * std::sqrt(5.0 / 25.0 / n));
  CHECK(testing::ks_one_sample(c, [](double t) { return -std::expm1(-2.0 * t); }) < 1.628 / std::sqrt(n));
  const double le = rsb::update_eta2_log(1e9, true, std::log(1e-12), -700.0, rng);
  CHECK(std::isfinite(le));
}

TEST_CASE("latent rates given eta2", "[eta]") {
  RngStream rng(33);
  const rsb::MixtureHyper h;
  const int n = 200000;
  std::vector<double> w(n), v(n), ratio(n);
  for (int i = 0; i < n; ++i) {
    const auto l = rsb::update_latents_log(std::log(std::exp(1.0) - 1.0), h, rng);
    w[i] = l.w;
    v[i] = l.v;
    ratio[i] = std::exp(l.log_u + 1.0) / (l.v + l.w + 1.0);
  }
  // w ~ Ga(1, 2), v ~ Ga(1/2, 1) at log(1 + eta2) = 1
  CHECK(std::fabs(testing::sample_mean(w) - 0.5) < 4.0 * 0.5 / std::sqrt(n));
  CHECK(std::fabs(testing::sample_mean(v) - 0.5) < 4.0 * std::sqrt(0.5 / n));
  CHECK(std::fabs(testing::sample_mean(ratio) - 1.0) < 4.0 * std::sqrt(testing::sample_var(ratio) / n));
}

TEST_CASE("mixing weight conditional", "[eta]") {
  RngStream rng(34);
  const rsb::MixtureHyper h;
  std::vector<std::uint8_t> z3(10, 0), z0(10, 0), z1(10, 1);
  z3[0] = z3[4] = z3[9] = 1;
  const int n = 100000;
  double s3 = 0, s0 = 0, s1 = 0;
  for (int i = 0; i < n; ++i) {
    s3 += rsb::update_s(z3, h, rng);
    s0 += rsb::update_s(z0, h, rng);
    s1 += rsb::update_s(z1, h, rng);
  }
  auto beta_sd = [](double a, double b) { return std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1))); };
  CHECK(std::fabs(s3 / n - 1.0 / 3.0) < 4.0 * beta_sd(4, 8) / std::sqrt(n));
  CHECK(std::fabs(s0 / n - 1.0 / 12.0) < 4.0 * beta_sd(1, 11) / std::sqrt(n));
  CHECK(std::fabs(s1 / n - 11.0 / 12.0) < 4.0 * beta_sd(11, 1) / std::sqrt(n));
}

TEST_CASE("point mass is exact when z = 0", "[eta]") {
  RngStream rng(35);
  const rsb::MixtureHyper h;
  Eigen::VectorXd y(4), ll(4);
  y << 0, 3, 50, 2;
  ll << 0.1, 1.0, 1.2, -2.0;
  auto st = rsb::EtaLatentState::initial(4);
  st.s = 0.0;
  for (int t = 0; t < 200; ++t) {
    rsb::eta_step(y, ll, st, h, rng, rsb::SMode::Fixed);
    for (std::size_t i = 0; i < 4; ++i) REQUIRE(st.eta(i) == 1.0);
  }
  st.s = 0.5;
  for (int t = 0; t < 200; ++t) {
    rsb::eta_step(y, ll, st, h, rng);
    for (std::size_t i = 0; i < 4; ++i) {
      if (!st.z[i]) REQUIRE(st.eta(i) == 1.0);
      REQUIRE(std::exp(st.log_u[i]) > 0.0);
      REQUIRE(st.v[i] > 0.0);
      REQUIRE(st.w[i] > 0.0);
    }
    REQUIRE(st.s > 0.0);
    REQUIRE(st.s < 1.0);
  }
}

TEST_CASE("gross outlier is flagged at the oracle rate", "[eta]") {
  const double lam = 2.0, y = 100.0, s = 0.1;
  const auto m = rsb::rsb_mixing(rsb::RsbParams{});
  const double lm = rsb::marginal_count_log_pmf(y, std::log(lam), m);
  const double oracle = 1.0 / (1.0 + (1.0 - s) / s * std::exp(rsb::log_poisson_pmf(y, std::log(lam)) - lm));
  RngStream rng(36);
  const rsb::MixtureHyper h;
  auto st = rsb::EtaLatentState::initial(1);
  st.s = s;
  Eigen::VectorXd yy(1), ll(1);
  yy << y;
  ll << std::log(lam);
  const int n = 40000;
  std::vector<double> z(n);
  for (int t = 0; t < 1000; ++t) rsb::eta_step(yy, ll, st, h, rng, rsb::SMode::Fixed);
  for (int t = 0; t < n; ++t) {
    rsb::eta_step(yy, ll, st, h, rng, rsb::SMode::Fixed);
    z[t] = st.z[0];
  }
  const double freq = testing::sample_mean(z);
  CHECK(freq > 0.95);
  CHECK(std::fabs(freq - oracle) < 4.0 * rsb::batch_means_se(z) + 1e-4);
}

TEST_CASE("Geweke test of the eta sweep", "[eta][geweke]") {
  const auto z = geweke::eta_sweep();
  for (std::size_t j = 0; j < z.size(); ++j) {
    INFO("test function " << j << " z " << z[j]);
    CHECK(std::fabs(z[j]) < 4.0);
  }
}
