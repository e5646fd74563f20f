#include <catch_amalgamated.hpp>

#include <cmath>

#include "rsb/errors.hpp"
#include "rsb/quadrature.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("gaussian integrals", "[quadrature]") {
  for (double s : {1e-6, 0.1, 1.0, 300.0})
    for (double m : {-50.0, 0.0, 1e3}) {
      // rounding of t near m limits the attainable accuracy to about eps |m| / s
      if (s < 1e10 * std::numeric_limits<double>::epsilon() * std::fabs(m)) continue;
      auto f = [&](double t) { return -0.5 * (t - m) * (t - m) / (s * s); };
      const auto r = rsb::integrate_exp(f, {});
      INFO("s=" << s << " m=" << m);
      CHECK_THAT(r.log_value, WithinAbs(std::log(s * std::sqrt(2.0 * M_PI)), 1e-10));
      CHECK(r.rel_error < 1e-9);
    }
}

TEST_CASE("bounded ranges and boundary modes", "[quadrature]") {
  rsb::QuadratureOptions o;
  o.lower = 0.0;
  auto ex = [](double t) { return -t; };
  CHECK_THAT(rsb::integrate_exp(ex, o).log_value, WithinAbs(0.0, 1e-11));
  o.lower = -std::numeric_limits<double>::infinity();
  o.upper = std::log(0.01);
  // integral of e^{t/2} up to log 0.01
  auto half = [](double t) { return 0.5 * t; };
  CHECK_THAT(rsb::integrate_exp(half, o).log_value, WithinAbs(std::log(2.0 * 0.1), 1e-11));
  o.lower = 2.0;
  o.upper = 2.0;
  CHECK(rsb::integrate_exp(half, o).log_value == -std::numeric_limits<double>::infinity());
}

TEST_CASE("heavy algebraic tails", "[quadrature]") {
  // integrand (1+t^2)^{-1} over the line
  auto cauchy = [](double t) { return -std::log1p(t * t); };
  CHECK_THAT(std::exp(rsb::integrate_exp(cauchy, {}).log_value), WithinRel(M_PI, 1e-8));
  // Beta-type kink at an endpoint
  rsb::QuadratureOptions o;
  o.lower = 0.0;
  o.upper = 1.0;
  auto sq = [](double t) { return -0.5 * std::log(t); };
  CHECK_THAT(std::exp(rsb::integrate_exp(sq, o).log_value), WithinRel(2.0, 1e-8));
}

TEST_CASE("far from the hint", "[quadrature]") {
  rsb::QuadratureOptions o;
  o.hint = -4000.0;
  auto f = [](double t) { return -0.5 * (t - 5000.0) * (t - 5000.0); };
  CHECK_THAT(rsb::integrate_exp(f, o).log_value, WithinAbs(0.5 * std::log(2.0 * M_PI), 1e-10));
}

TEST_CASE("evaluation cap is enforced", "[quadrature]") {
  rsb::QuadratureOptions o;
  o.max_evaluations = 100;
  CHECK_THROWS_AS(rsb::integrate_exp([](double t) { return -t * t; }, o), rsb::QuadratureError);
}
