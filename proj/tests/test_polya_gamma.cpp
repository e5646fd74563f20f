#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rsb/polya_gamma.hpp"
#include "rsb/rng.hpp"
#include "support.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Moments of the infinite-sum construction sum_k g_k / (2 pi^2 ((k-1/2)^2 + c^2/(4 pi^2))), g_k ~ Ga(b)
struct SeriesMoments {
  double mean, var;
};

SeriesMoments series_moments(double b, double c, int terms = 2000000) {
  const double pi2 = M_PI * M_PI;
  const double q = c * c / (4.0 * pi2);
  long double s1 = 0.0L, s2 = 0.0L;
  for (int k = terms; k >= 1; --k) {
    const long double d = (k - 0.5L) * (k - 0.5L) + q;
    s1 += 1.0L / d;
    s2 += 1.0L / (d * d);
  }
  // tails beyond the last term, by the integral of 1/x^2 and 1/x^4
  s1 += 1.0L / terms;
  s2 += 1.0L / (3.0L * terms * terms * terms);
  return {double(b * s1 / (2.0 * pi2)), double(b * s2 / (4.0 * pi2 * pi2))};
}

double series_draw(double b, double c, rsb::RngStream& rng, int terms = 1000) {
  const double pi2 = M_PI * M_PI;
  double s = 0.0;
  for (int k = 1; k <= terms; ++k) s += rng.gamma(b) / ((k - 0.5) * (k - 0.5) + c * c / (4.0 * pi2));
  // expected remainder of the truncated terms
  s += b / (terms + 0.0);
  return s / (2.0 * pi2);
}

}  // namespace

TEST_CASE("moment formulas match the series construction", "[pg]") {
  for (double c : {0.0, 1e-6, 0.01, 0.5, 2.0, 30.0, 700.0}) {
    const auto m = series_moments(1.0, c);
    INFO("c=" << c);
    CHECK_THAT(rsb::pg_mean(1.0, c), WithinRel(m.mean, 1e-9));
    CHECK_THAT(rsb::pg_variance(1.0, c), WithinRel(m.var, 1e-9));
    CHECK_THAT(rsb::pg_mean(7.0, -c), WithinRel(7.0 * m.mean, 1e-9));
  }
  CHECK_THAT(rsb::pg_mean(3.0, 0.0), WithinRel(0.75, 1e-15));
  CHECK_THAT(rsb::pg_mean(1.0, 2.0), WithinRel(std::tanh(1.0) / 4.0, 1e-14));
}

TEST_CASE("PG(1,2) mean identity", "[pg]") {
  rsb::RngStream rng(21);
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rsb::pg_sample(1.0, 2.0, rng);
  CHECK_THAT(sum / n, WithinRel(0.19040, 0.01));
}

TEST_CASE("sample moments across shapes and tilts", "[pg]") {
  rsb::RngStream rng(22);
  for (double b : {1.0, 2.0, 50.0, 1050.0})
    for (double c : {0.01, 0.5, 2.0}) {
      const int n = 100000;
      std::vector<double> x(n);
      for (auto& v : x) v = rsb::pg_sample(b, c, rng);
      const double m = testing::sample_mean(x), var = testing::sample_var(x);
      double m4 = 0.0;
      for (double v : x) m4 += std::pow(v - m, 4.0) / n;
      INFO("b=" << b << " c=" << c);
      CHECK(std::fabs(m - rsb::pg_mean(b, c)) < 3.0 * std::sqrt(var / n));
      CHECK(std::fabs(var - rsb::pg_variance(b, c)) < 3.0 * std::sqrt((m4 - var * var) / n));
    }
}

TEST_CASE("zero tilt and large shape", "[pg]") {
  rsb::RngStream rng(23);
  const int n = 200000;
  double s0 = 0.0, s1 = 0.0;
  for (int i = 0; i < n; ++i) {
    s0 += rsb::pg_sample(3.0, 0.0, rng);
    s1 += rsb::pg_sample(1050.0, 1.0, rng);
  }
  CHECK(std::fabs(s0 / n - 0.75) < 4.0 * std::sqrt(rsb::pg_variance(3.0, 0.0) / n));
  CHECK_THAT(s1 / n, WithinRel(1050.0 * std::tanh(0.5) / 2.0, 0.02));
}

TEST_CASE("law agrees with the truncated series", "[pg]") {
  for (auto [b, c] : std::vector<std::pair<double, double>>{{1.0, 1.0}, {2.5, 0.7}, {0.3, 3.0}}) {
    rsb::RngStream r1(24, 1), r2(24, 2);
    const int n = 20000;
    std::vector<double> a(n), s(n);
    for (auto& v : a) v = rsb::pg_sample(b, c, r1);
    for (auto& v : s) v = series_draw(b, c, r2);
    INFO("b=" << b << " c=" << c);
    CHECK(testing::ks_two_sample(a, s) < 1.628 * std::sqrt(2.0 / n));
  }
}

TEST_CASE("draws are positive and finite", "[pg]") {
  rsb::RngStream rng(25);
  for (double b : {1e-3, 0.5, 1.0, 169.5, 171.0, 1e6})
    for (double c : {0.0, 1e-9, 5.0, -40.0, 900.0}) {
      const double v = rsb::pg_sample(b, c, rng);
      INFO("b=" << b << " c=" << c);
      CHECK(v > 0.0);
      CHECK(std::isfinite(v));
    }
  CHECK_THROWS(rsb::pg_sample(0.0, 1.0, rng));
}
