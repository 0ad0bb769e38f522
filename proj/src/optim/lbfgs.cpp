#include "onevision/optim/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>

namespace onevision::optim {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::GradientTolerance: return "gradient_tolerance";
    case Termination::StepTolerance: return "step_tolerance";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::LineSearchFailed: return "line_search_failed";
    case Termination::NonFinite: return "non_finite";
  }
  return "unknown";
}

namespace {

struct Point {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative along the search direction
  Vec x;
  Vec g;
};

bool finite(const Vec& v) { return v.allFinite(); }

class LineSearch {
 public:
  LineSearch(const ObjectiveFunction& obj, const LbfgsOptions& opts, const Vec& x0, double f0, const Vec& d,
             double slope0, int& evaluations)
      : obj_(obj), opts_(opts), x0_(x0), f0_(f0), d_(d), slope0_(slope0), evaluations_(evaluations) {}

  // Returns true and fills `out` when a point with sufficient decrease was found.
  bool run(double alpha0, Point& out) {
    Point prev{0.0, f0_, slope0_, x0_, Vec()};
    double alpha = alpha0;
    for (int i = 0; i < opts_.max_line_search; ++i) {
      Point cur = evaluate(alpha);
      if (!std::isfinite(cur.f) || !finite(cur.g)) {
        alpha = prev.alpha + 0.5 * (alpha - prev.alpha);
        continue;
      }
      if (within_noise(cur)) {
        if (approx_wolfe(cur)) {
          out = std::move(cur);
          return true;
        }
        if (cur.slope >= 0.0) return zoom(prev, cur, out);
        prev = std::move(cur);
        alpha *= 2.0;
        continue;
      }
      if (cur.f > f0_ + opts_.wolfe_c1 * alpha * slope0_ || (i > 0 && cur.f >= prev.f)) {
        return zoom(prev, cur, out);
      }
      if (std::abs(cur.slope) <= -opts_.wolfe_c2 * slope0_) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope >= 0.0) return zoom(cur, prev, out);
      remember(cur);
      prev = std::move(cur);
      alpha *= 2.0;
    }
    return fallback(out);
  }

 private:
  Point evaluate(double alpha) {
    Point p;
    p.alpha = alpha;
    p.x = x0_ + alpha * d_;
    p.g.resize(p.x.size());
    p.f = obj_.value_and_gradient(as_span(p.x), as_span(p.g));
    ++evaluations_;
    p.slope = p.g.dot(d_);
    return p;
  }

  // Near a minimizer loss differences drop below roundoff; there the
  // directional derivative still resolves progress (approximate Wolfe).
  bool within_noise(const Point& p) const {
    return std::abs(p.f - f0_) <= opts_.noise_rel * std::abs(f0_);
  }

  bool approx_wolfe(const Point& p) const {
    return p.slope >= opts_.wolfe_c2 * slope0_ && p.slope <= (2.0 * kApproxDelta - 1.0) * slope0_;
  }

  static constexpr double kApproxDelta = 0.1;

  void remember(const Point& p) {
    if (std::isfinite(p.f) && p.f < f0_ && (!best_ || p.f < best_->f)) best_ = p;
  }

  bool fallback(Point& out) {
    if (best_) {
      out = *best_;
      return true;
    }
    return false;
  }

  bool zoom(Point lo, Point hi, Point& out) {
    for (int i = 0; i < opts_.max_line_search; ++i) {
      const double width = hi.alpha - lo.alpha;
      double alpha = cubic_min(lo, hi);
      const double a = std::min(lo.alpha, hi.alpha);
      const double b = std::max(lo.alpha, hi.alpha);
      const double margin = 0.1 * (b - a);
      if (!std::isfinite(alpha) || alpha < a + margin || alpha > b - margin) alpha = 0.5 * (lo.alpha + hi.alpha);
      if (std::abs(width) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
      Point cur = evaluate(alpha);
      if (!std::isfinite(cur.f) || !finite(cur.g)) {
        hi = std::move(cur);
        hi.f = std::numeric_limits<double>::infinity();
        continue;
      }
      remember(cur);
      if (within_noise(cur)) {
        if (approx_wolfe(cur)) {
          out = std::move(cur);
          return true;
        }
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) {
          hi = std::move(cur);
        } else {
          lo = std::move(cur);
        }
        continue;
      }
      if (cur.f > f0_ + opts_.wolfe_c1 * alpha * slope0_ || cur.f >= lo.f) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.slope) <= -opts_.wolfe_c2 * slope0_) {
          out = std::move(cur);
          return true;
        }
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
    }
    if (lo.alpha > 0.0) remember(lo);
    return fallback(out);
  }

  static double cubic_min(const Point& p, const Point& q) {
    if (!std::isfinite(p.f) || !std::isfinite(q.f)) return std::numeric_limits<double>::quiet_NaN();
    const double d1 = p.slope + q.slope - 3.0 * (p.f - q.f) / (p.alpha - q.alpha);
    const double disc = d1 * d1 - p.slope * q.slope;
    if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double d2 = std::copysign(std::sqrt(disc), q.alpha - p.alpha);
    return q.alpha - (q.alpha - p.alpha) * (q.slope + d2 - d1) / (q.slope - p.slope + 2.0 * d2);
  }

  const ObjectiveFunction& obj_;
  const LbfgsOptions& opts_;
  const Vec& x0_;
  double f0_;
  const Vec& d_;
  double slope0_;
  int& evaluations_;
  std::optional<Point> best_;
};

}  // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFunction& objective, const Vec& x0, const LbfgsOptions& options) {
  const auto n = static_cast<Eigen::Index>(objective.dimension());
  LbfgsResult result;
  result.x = x0;
  Vec g(n);
  double f = objective.value_and_gradient(as_span(result.x), as_span(g));
  result.evaluations = 1;
  result.loss = f;
  result.history.push_back(f);
  if (!std::isfinite(f) || !finite(g)) {
    result.reason = Termination::NonFinite;
    return result;
  }

  std::deque<Vec> s_hist;
  std::deque<Vec> y_hist;
  std::deque<double> rho_hist;
  std::vector<double> alpha_buf(static_cast<std::size_t>(std::max(options.memory, 1)));

  Vec best_x = result.x;
  double best_f = f;
  result.reason = Termination::MaxIterations;
  bool retried_steepest = false;
  while (true) {
    if (n == 0 || g.lpNorm<Eigen::Infinity>() < options.g_tol) {
      result.reason = Termination::GradientTolerance;
      break;
    }
    if (result.iterations >= options.max_iters) {
      result.reason = Termination::MaxIterations;
      break;
    }

    // Two-loop recursion for d = -H g.
    Vec q = g;
    const auto m = s_hist.size();
    for (std::size_t k = m; k-- > 0;) {
      alpha_buf[k] = rho_hist[k] * s_hist[k].dot(q);
      q -= alpha_buf[k] * y_hist[k];
    }
    double gamma = 1.0;
    if (m > 0) gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    Vec d = gamma * q;
    for (std::size_t k = 0; k < m; ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(d);
      d += s_hist[k] * (alpha_buf[k] - beta);
    }
    d = -d;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -g;
      slope = -g.squaredNorm();
    }

    const double alpha0 = s_hist.empty() ? std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>()) : 1.0;
    LineSearch search(objective, options, result.x, f, d, slope, result.evaluations);
    Point next;
    if (!search.run(alpha0, next)) {
      if (!s_hist.empty() && !retried_steepest) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        retried_steepest = true;
        continue;
      }
      result.reason = Termination::LineSearchFailed;
      break;
    }
    retried_steepest = false;

    Vec s = next.x - result.x;
    Vec y = next.g - g;
    const double step = s.lpNorm<Eigen::Infinity>();
    result.x = std::move(next.x);
    g = std::move(next.g);
    f = next.f;
    ++result.iterations;
    result.history.push_back(f);
    if (f < best_f) {
      best_f = f;
      best_x = result.x;
    }

    const double sy = s.dot(y);
    if (sy > 1e-14 * y.squaredNorm() && sy > 0.0) {
      if (static_cast<int>(s_hist.size()) == options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    if (step < options.x_tol) {
      result.reason = Termination::StepTolerance;
      break;
    }
  }
  if (best_f < f) {
    result.x = std::move(best_x);
    f = best_f;
  }
  result.loss = f;
  return result;
}

}  // namespace onevision::optim
