#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <vector>

#include "rsb/distributions.hpp"
#include "rsb/errors.hpp"
#include "rsb/quadrature.hpp"
#include "rsb/rng.hpp"
#include "rsb/special.hpp"
#include "support.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using rsb::RsbParams;

namespace {

// closed form in long double, written out independently of the library
long double rsb_pdf_ref(long double u, long double a, long double b) {
  const long double L = std::log1p(u);
  const long double lb = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return std::exp((a - 1) * std::log(L) - std::log1p(u) - (a + b) * std::log1p(L) - lb);
}

double total_mass(const RsbParams& p) {
  auto f = [&](double t) { return rsb::rsb_log_pdf_t(t, p); };
  return std::exp(rsb::integrate_exp(f, {}).log_value);
}

}  // namespace

TEST_CASE("rsb density closed form", "[dist]") {
  const RsbParams p{};
  CHECK_THAT(rsb::rsb_pdf(1.0, p), WithinRel(double(rsb_pdf_ref(1.0L, 0.5L, 0.5L)), 1e-13));
  CHECK_THAT(rsb::rsb_pdf(1.0, p), WithinAbs(0.112905, 1e-6));
  for (double u : {1e-200, 1e-8, 0.3, 17.0, 1e20, 1e300})
    for (auto [a, b] : std::vector<std::pair<double, double>>{{0.5, 0.5}, {0.1, 2.0}, {0.9, 1.0}}) {
      const RsbParams q{a, b, 0.0};
      INFO("u=" << u << " a=" << a << " b=" << b);
      CHECK_THAT(rsb::rsb_log_pdf(u, q), WithinRel(double(std::log(rsb_pdf_ref(u, a, b))), 1e-12));
      CHECK_THAT(rsb::rsb_log_pdf_logu(std::log(u), q), WithinRel(rsb::rsb_log_pdf(u, q), 1e-12));
      CHECK_THAT(rsb::rsb_log_pdf_t(std::log(u), q), WithinAbs(rsb::rsb_log_pdf(u, q) + std::log(u), 1e-9));
    }
  // log variant stays finite far beyond double range of u
  CHECK(std::isfinite(rsb::rsb_log_pdf_logu(5000.0, p)));
  CHECK_THROWS_AS(rsb::rsb_pdf(0.0, p), std::domain_error);
  CHECK_THROWS_AS(rsb::rsb_pdf(-1.0, p), std::domain_error);
  CHECK_THROWS_AS(rsb::rsb_pdf(std::numeric_limits<double>::infinity(), p), std::domain_error);
  CHECK_THROWS(rsb::rsb_pdf(1.0, RsbParams{0.5, 0.5, 1.0}));
  CHECK_THROWS(RsbParams{-0.5, 0.5, 0.0}.validate());
}

TEST_CASE("origin and tail behaviour", "[dist]") {
  const RsbParams p{};
  CHECK_THAT(rsb::rsb_pdf(1e-8, p) * std::sqrt(1e-8), WithinAbs(1.0 / M_PI, 1e-6));
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.5, 0.5}, {0.2, 1.0}, {0.9, 2.0}}) {
    const RsbParams q{a, b, 0.0};
    const double B = std::exp(rsb::log_beta_fn(a, b));
    CHECK_THAT(rsb::rsb_pdf(1e-10, q) * std::pow(1e-10, 1.0 - a) * B, WithinAbs(1.0, 1e-4));
    // At finite u the tail ratio equals (L/(1+L))^(a+b) (log u / L)^(1+b) u/(1+u); it tends to one.
    double prev = 0.0;
    for (double lu : {1e6, 1e8, 1e10, 1e50, 1e300}) {
      const double L = std::log1p(lu);
      const double ratio = rsb::rsb_pdf(lu, q) * lu * std::pow(std::log(lu), 1.0 + b) * B;
      CHECK_THAT(ratio, WithinRel(std::pow(L / (1.0 + L), a + b) * std::pow(std::log(lu) / L, 1.0 + b) * lu / (1.0 + lu), 1e-10));
      CHECK(ratio > prev);
      prev = ratio;
    }
    CHECK_THAT(prev, WithinAbs(1.0, 2e-3 * (a + b)));
  }
}

TEST_CASE("rsb density integrates to one", "[dist]") {
  for (double a : {0.1, 0.5, 0.9})
    for (double b : {0.5, 1.0, 2.0}) {
      INFO("a=" << a << " b=" << b);
      const RsbParams p{a, b, 0.0};
      CHECK_THAT(total_mass(p), WithinAbs(1.0, 1e-8));
    }
  // independent cross-check with boost tanh-sinh in L = log(1+u) mapped to (0,1)
  const RsbParams p{};
  boost::math::quadrature::tanh_sinh<double> ts;
  auto g = [&](double x) {
    const double L = x / (1.0 - x);
    if (L <= 0.0 || !std::isfinite(L)) return 0.0;
    return std::exp(rsb::rsb_log_pdf_logu(rsb::log_expm1(L), p) + L) / ((1.0 - x) * (1.0 - x));
  };
  CHECK_THAT(ts.integrate(g, 0.0, 1.0), WithinAbs(1.0, 1e-7));
}

TEST_CASE("rsb cdf identities", "[dist]") {
  const RsbParams p{};
  CHECK_THAT(rsb::rsb_cdf(std::exp(1.0) - 1.0, p), WithinAbs(0.5, 1e-13));
  const double L = std::log1p(1000.0);
  const double arcsine = 2.0 / M_PI * std::asin(std::sqrt(L / (1.0 + L)));
  CHECK_THAT(rsb::rsb_cdf(1000.0, p), WithinAbs(arcsine, 1e-12));
  CHECK_THAT(rsb::rsb_cdf(1000.0, p), WithinAbs(0.7685, 1e-4));
  CHECK(1.0 - rsb::rsb_cdf(1000.0, p) >= 0.2);
  double prev = 0.0;
  for (double lu = -20; lu <= 40; lu += 0.5) {
    const double c = rsb::rsb_cdf(std::exp(lu), p);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK_THROWS_AS(rsb::rsb_cdf(0.0, p), std::domain_error);
}

TEST_CASE("cdf derivative matches the density", "[dist]") {
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.5, 0.5}, {0.3, 2.0}}) {
    const RsbParams p{a, b, 0.0};
    for (int k = 0; k < 20; ++k) {
      const double u = std::pow(10.0, -6.0 + 12.0 * k / 19.0);
      const double h = 1e-4;
      const double num = (rsb::rsb_cdf(u * std::exp(h), p) - rsb::rsb_cdf(u * std::exp(-h), p)) / (u * 2.0 * std::sinh(h));
      INFO("u=" << u);
      CHECK_THAT(num, WithinRel(rsb::rsb_pdf(u, p), 1e-6));
    }
  }
}

TEST_CASE("direct sampler", "[dist]") {
  CHECK_THAT(rsb::rsb_from_beta(0.5), WithinRel(std::exp(1.0) - 1.0, 1e-15));
  const RsbParams p{};
  rsb::RngStream rng(11);
  const int n = 100000;
  std::vector<double> x(n);
  for (auto& v : x) v = rsb::rsb_sample_direct_log(p, rng);
  // compare on the log scale so overflowing draws keep their order
  const double ks = testing::ks_one_sample(x, [&](double t) {
    const double L = t > 700.0 ? t : std::log1p(std::exp(t));
    return boost::math::ibeta(p.a, p.b, L / (1.0 + L));
  });
  CHECK(ks < 0.006);
  std::vector<double> s = x;
  std::nth_element(s.begin(), s.begin() + n / 2, s.end());
  // median of log u is log(e-1); KS band for the median at level 0.01
  const double med = s[n / 2];
  CHECK(rsb::rsb_cdf(std::exp(med), p) > 0.5 - 0.006);
  CHECK(rsb::rsb_cdf(std::exp(med), p) < 0.5 + 0.006);
}

TEST_CASE("hierarchical sampler agrees with the direct sampler", "[dist]") {
  const RsbParams p{};
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    rsb::RngStream r1(seed, 1), r2(seed, 2);
    const int n = 100000;
    std::vector<double> d(n), h(n);
    for (auto& v : d) v = rsb::rsb_sample_direct_log(p, r1);
    for (auto& v : h) v = rsb::rsb_sample_hier_log(p, r2);
    CHECK(testing::ks_two_sample(d, h) < 0.0086);
  }
  const RsbParams q{0.3, 2.0, 0.0};
  rsb::RngStream r1(9, 1), r2(9, 2);
  std::vector<double> d(50000), h(50000);
  for (auto& v : d) v = rsb::rsb_sample_direct_log(q, r1);
  for (auto& v : h) v = rsb::rsb_sample_hier_log(q, r2);
  CHECK(testing::ks_two_sample(d, h) < 1.628 * std::sqrt(2.0 / 50000));
  CHECK_THROWS(rsb::rsb_sample_hier(RsbParams{1.5, 0.5, 0.0}, r1));
}

TEST_CASE("exponential given v has mean 1/v", "[dist]") {
  rsb::RngStream rng(12);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential(0.25);
  CHECK(std::fabs(sum / n - 4.0) < 4.0 * 4.0 / std::sqrt(n));
}

TEST_CASE("running mean of rsb draws does not settle", "[dist]") {
  const RsbParams p{};
  rsb::RngStream rng(13);
  double log_sum = -std::numeric_limits<double>::infinity();
  std::vector<double> log_means;
  std::size_t n = 0;
  for (std::size_t target : {1000u, 10000u, 100000u, 1000000u}) {
    for (; n < target; ++n) log_sum = rsb::log_add_exp(log_sum, rsb::rsb_sample_direct_log(p, rng));
    log_means.push_back(log_sum - std::log(static_cast<double>(n)));
  }
  // heavier than any power tail: the log running mean keeps climbing by orders of magnitude
  CHECK(log_means.back() - log_means.front() > std::log(10.0));
}

TEST_CASE("generalized tail family", "[dist]") {
  const RsbParams p0{0.5, 0.5, 0.0}, p1{0.5, 0.5, 1.0};
  CHECK_THAT(rsb::grsb_unnorm_pdf(1.0, p0), WithinRel(std::pow(2.0, -0.5) * std::pow(1.0 + std::log(2.0), -1.5), 1e-14));
  CHECK_THAT(rsb::grsb_unnorm_pdf(1.0, p0), WithinAbs(0.320954, 1e-6));
  const double B = M_PI;
  for (double u : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    const double L = std::log1p(u);
    // exact ratio to the rsb density; only the slowly varying factor depends on u
    const double expect = B * B * std::sqrt((1.0 + u) / u) * std::sqrt(L / (1.0 + L));
    CHECK_THAT(rsb::grsb_unnorm_pdf(u, p0) * B / rsb::rsb_pdf(u, p0), WithinRel(expect, 1e-12));
  }
  for (double u : {1e8, 1e20, 1e100}) {
    const double L = std::log1p(u);
    const double value = rsb::grsb_unnorm_pdf(u, p1) * u * u * std::pow(std::log(u), 1.5);
    CHECK_THAT(value, WithinRel(std::pow(u / (1.0 + u), 1.5) * std::pow(std::log(u) / (1.0 + L), 1.5), 1e-10));
  }
  CHECK_THAT(rsb::grsb_unnorm_pdf(1e100, p1) * 1e200 * std::pow(std::log(1e100), 1.5), WithinAbs(1.0, 0.01));
  CHECK_THROWS_AS(rsb::grsb_unnorm_pdf(0.0, p1), std::domain_error);
  for (double t : {-30.0, -1.0, 0.0, 2.5, 40.0})
    CHECK_THAT(rsb::grsb_log_unnorm_pdf_t(t, p1), WithinAbs(rsb::grsb_log_unnorm_pdf_logu(t, p1) + t, 1e-12));
  // unit delta: integral in L of (log-density) with boost tanh-sinh as the reference
  boost::math::quadrature::tanh_sinh<double> ts;
  auto h = [&](double x) {
    const double L = x / (1.0 - x);
    if (L <= 0.0 || !std::isfinite(L)) return 0.0;
    const double u = std::expm1(L);
    if (!std::isfinite(u)) return 0.0;
    return std::exp(rsb::grsb_log_unnorm_pdf(u, p1) + L) / ((1.0 - x) * (1.0 - x));
  };
  CHECK_THAT(rsb::grsb_log_normalizer(p1), WithinAbs(std::log(ts.integrate(h, 0.0, 1.0)), 1e-8));
  const auto m = rsb::grsb_mixing(p1);
  auto g = [&](double t) { return m.log_density_t(t); };
  CHECK_THAT(std::exp(rsb::integrate_exp(g, {}).log_value), WithinAbs(1.0, 1e-9));
}

TEST_CASE("marginal count pmf", "[dist]") {
  const auto ex = rsb::exponential_mixing(1.0);
  CHECK_THAT(rsb::marginal_count_pmf(0.0, 0.0, ex), WithinRel(0.5, 1e-10));
  CHECK_THAT(rsb::marginal_count_pmf(3.0, 0.0, ex), WithinRel(0.0625, 1e-10));
  // geometric marginal with mean e^z
  for (double z : {-3.0, 1.5})
    for (double y : {0.0, 4.0, 30.0}) {
      const double q = std::exp(z) / (1.0 + std::exp(z));
      CHECK_THAT(rsb::marginal_count_pmf(y, z, ex), WithinRel(std::pow(q, y) * (1.0 - q), 1e-9));
    }
  const auto m = rsb::rsb_mixing(RsbParams{});
  auto ratio = [&](double y) { return std::exp(rsb::marginal_count_log_pmf(y, 1.0, m) - rsb::marginal_count_log_pmf(y, 0.0, m)); };
  // reference: adaptive Gauss-Kronrod in t over a window around the kernel peak
  auto ref = [&](double y, double z) {
    const double c = std::log(y) - z;
    auto g = [&](double t) {
      const double lam = std::exp(z + t);
      return std::exp(double(std::log(rsb_pdf_ref(std::exp((long double)t), 0.5L, 0.5L))) + t + y * std::log(lam) - lam -
                      std::lgamma(y + 1.0));
    };
    double sum = 0.0;
    for (int k = -40; k < 16; ++k)
      sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, c + 0.25 * k, c + 0.25 * (k + 1), 10, 1e-12);
    return std::log(sum);
  };
  for (double y : {200.0, 2000.0})
    for (double z : {0.0, 1.0}) CHECK_THAT(rsb::marginal_count_log_pmf(y, z, m), WithinAbs(ref(y, z), 1e-8));
  // the ratio sinks towards one, but only logarithmically in y
  const double r200 = ratio(200.0), r2000 = ratio(2000.0), r1e6 = ratio(1e6);
  CHECK(r200 > r2000);
  CHECK(r2000 > r1e6);
  CHECK(r1e6 > 1.0);
  // sums to one over y
  double total = 0.0;
  for (double y = 0; y < 400; ++y) total += rsb::marginal_count_pmf(y, 0.5, ex);
  CHECK_THAT(total, WithinAbs(1.0, 1e-9));
  CHECK_THROWS(rsb::marginal_count_pmf(1.5, 0.0, ex));
}

TEST_CASE("quadrature failure reports the achieved error", "[dist]") {
  rsb::QuadratureOptions o;
  o.max_evaluations = 50;
  try {
    rsb::integrate_exp([](double t) { return -t * t; }, o);
    FAIL("expected a QuadratureError");
  } catch (const rsb::QuadratureError& e) {
    CHECK(e.achieved_error() >= 0.0);
  }
}
