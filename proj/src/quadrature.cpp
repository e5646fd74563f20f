#include "rsb/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdio>
#include <vector>

#include "rsb/errors.hpp"

namespace rsb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class Integrator {
 public:
  Integrator(const std::function<double(double)>& f, const QuadratureOptions& o) : f_(f), o_(o) {}

  double eval(double t) {
    if (++count_ > o_.max_evaluations)
      throw QuadratureError("quadrature evaluation cap exceeded", err_ / std::max(total_, 1e-300));
    const double v = f_(t);
    return std::isnan(v) ? kNegInf : v;
  }

  double clip(double t) const { return std::clamp(t, o_.lower, o_.upper); }

  QuadratureResult run() {
    if (!(o_.lower < o_.upper)) return {kNegInf, 0.0, 0};
    find_mode();
    if (fmode_ == kNegInf) return {kNegInf, 0.0, count_};
    find_width();
    total_ = 0.0;
    err_ = 0.0;
    side(+1.0);
    side(-1.0);
    const double rel = total_ > 0.0 ? err_ / total_ : 0.0;
    if (!(total_ > 0.0) || rel > o_.fail_tol) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "quadrature did not converge: relative error %.3g after %zu evaluations",
                    rel, count_);
      throw QuadratureError(buf, rel);
    }
    return {fmode_ + std::log(total_), rel, count_};
  }

 private:
  void find_mode() {
    const double h = clip(std::isfinite(o_.hint) ? o_.hint : 0.0);
    std::vector<std::pair<double, double>> pts;
    auto probe = [&](double t) {
      t = clip(t);
      const double v = eval(t);
      // an integrable singularity on the boundary does not count as the mode
      pts.emplace_back(t, v == std::numeric_limits<double>::infinity() ? kNegInf : v);
      return pts.back().second;
    };
    for (int j = -60; j <= 60; ++j) probe(h + j);
    if (std::isfinite(o_.lower)) probe(o_.lower);
    if (std::isfinite(o_.upper)) probe(o_.upper);
    // keep walking while the maximum sits on the edge of the scan
    for (double dir : {1.0, -1.0}) {
      double step = 60.0, edge = clip(h + dir * step), f_edge = eval(edge);
      for (;;) {
        double best = kNegInf;
        for (const auto& pt : pts) best = std::max(best, pt.second);
        if (f_edge < best || step > 1e300 || edge == o_.lower || edge == o_.upper) break;
        step *= 2.0;
        edge = clip(h + dir * step);
        f_edge = probe(edge);
      }
    }
    std::sort(pts.begin(), pts.end());
    std::size_t ib = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (pts[i].second > pts[ib].second) ib = i;
    double best_t = pts[ib].first, best = pts[ib].second;
    if (best == kNegInf) {
      fmode_ = kNegInf;
      return;
    }
    const double lo = pts[ib > 0 ? ib - 1 : ib].first, hi = pts[ib + 1 < pts.size() ? ib + 1 : ib].first;
    if (hi > lo) {
      auto neg = [&](double t) {
        const double v = eval(t);
        return v == std::numeric_limits<double>::infinity() ? std::numeric_limits<double>::infinity() : -v;
      };
      const auto r = boost::math::tools::brent_find_minima(neg, lo, hi, 45);
      if (-r.second > best) {
        best = -r.second;
        best_t = r.first;
      }
    }
    mode_ = best_t;
    fmode_ = best;
  }

  void find_width() {
    double w = 1e3;
    for (double dir : {1.0, -1.0}) {
      double d = 1e-8 * std::max(1.0, std::fabs(mode_));
      while (d < 1e3) {
        const double t = mode_ + dir * d;
        if (t < o_.lower || t > o_.upper) break;
        if (eval(t) < fmode_ - 0.5) break;
        d *= 2.0;
      }
      w = std::min(w, d);
    }
    width_ = std::max(w, 1e-12);
  }

  void side(double dir) {
    const double bound = dir > 0 ? o_.upper : o_.lower;

    double prev_piece = -1.0, last_piece = -1.0;
    double side_total = 0.0;
    bool hit_bound = false;
    for (int k = 0; k < 4000; ++k) {
      double a = mode_ + dir * width_ * (std::ldexp(1.0, k) - 1.0);
      double b = mode_ + dir * width_ * (std::ldexp(1.0, k + 1) - 1.0);
      if ((dir > 0 && b >= bound) || (dir < 0 && b <= bound)) {
        b = bound;
        hit_bound = true;
      }
      if (!std::isfinite(b)) break;
      if (a == b) break;
      double e = 0.0;
      // Each piece is mapped onto [0, 1]; the boost error estimate is not
      // scaled by the interval length, so tolerances only hold there.
      const double x0 = dir * (a - mode_), len = dir * (b - a);
      auto g = [&](double x) {
        const double v = eval(mode_ + dir * (x0 + len * x));
        return v == std::numeric_limits<double>::infinity() ? 0.0 : std::exp(v - fmode_);
      };
      double v;
      if (hit_bound) {
        // tanh-sinh copes with an integrable singularity at the bound
        boost::math::quadrature::tanh_sinh<double> ts;
        v = len * ts.integrate(g, 0.0, 1.0, o_.rel_tol, &e);
      } else {
        v = len * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, 0.0, 1.0, 15, o_.rel_tol, &e);
      }
      e *= len;
      if (!std::isfinite(v)) throw QuadratureError("non-finite quadrature piece", 1.0);
      side_total += v;
      err_ += e;
      prev_piece = last_piece;
      last_piece = v;
      if (hit_bound) break;
      const double tail_ratio = (total_ + side_total) > 0.0 ? v / (total_ + side_total) : 1.0;
      if (tail_ratio < 1e-3 * o_.rel_tol && eval(b) < fmode_ - 30.0) break;
    }
    if (!hit_bound && prev_piece > 0.0 && last_piece < prev_piece) {
      // geometric extrapolation of what lies beyond the last piece
      const double r = last_piece / prev_piece;
      const double tail = last_piece * r / (1.0 - r);
      side_total += tail;
      err_ += tail;
    }
    total_ += side_total;
  }

  const std::function<double(double)>& f_;
  const QuadratureOptions& o_;
  std::size_t count_ = 0;
  double mode_ = 0.0, fmode_ = kNegInf, width_ = 1.0;
  double total_ = 0.0, err_ = 0.0;
};

}  // namespace

QuadratureResult integrate_exp(const std::function<double(double)>& log_f, const QuadratureOptions& opts) {
  Integrator it(log_f, opts);
  return it.run();
}

}  // namespace rsb
