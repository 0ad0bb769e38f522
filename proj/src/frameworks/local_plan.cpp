#include "onevision/frameworks/local_plan.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <algorithm>

#include <Eigen/Eigenvalues>

#include "onevision/core/contract.hpp"

namespace onevision::frameworks {

using optim::Dual;

namespace {

bool symmetric(const Mat& M) { return (M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()); }

double min_eigenvalue(const Mat& M) { return Eigen::SelfAdjointEigenSolver<Mat>(M).eigenvalues().minCoeff(); }

template <class S>
S quadratic(const Mat& Q, bool diagonal, const S* v, int n) {
  S acc(0.0);
  if (diagonal) {
    for (int r = 0; r < n; ++r) {
      if (Q(r, r) != 0.0) acc += Q(r, r) * (v[r] * v[r]);
    }
    return acc;
  }
  for (int r = 0; r < n; ++r) {
    S row(0.0);
    for (int c = 0; c < n; ++c) {
      if (Q(r, c) != 0.0) row += Q(r, c) * v[c];
    }
    acc += v[r] * row;
  }
  return acc;
}

}  // namespace

RegretWeights::RegretWeights(Mat Qx, Mat Qu) : Qx_(std::move(Qx)), Qu_(std::move(Qu)) {
  if (Qx_.rows() != Qx_.cols() || Qu_.rows() != Qu_.cols()) throw std::invalid_argument("weights must be square");
  if (!symmetric(Qx_) || !symmetric(Qu_)) throw std::invalid_argument("weights must be symmetric");
  if (Qx_.size() > 0 && min_eigenvalue(Qx_) < -1e-12) throw std::invalid_argument("Qx must be positive semi-definite");
  if (Qu_.size() > 0 && min_eigenvalue(Qu_) <= 0.0) throw std::invalid_argument("Qu must be positive definite");
  const auto off = [](const Mat& M) { return (M - Mat(M.diagonal().asDiagonal())).cwiseAbs().sum() == 0.0; };
  diagonal_ = off(Qx_) && off(Qu_);
}

RegretWeights RegretWeights::identity(int state_dim, int act_dim, double qu) {
  return RegretWeights(Mat::Identity(state_dim, state_dim), qu * Mat::Identity(act_dim, act_dim));
}

double RegretWeights::state_cost(std::span<const double> dx) const {
  return quadratic<double>(Qx_, diagonal_, dx.data(), static_cast<int>(dx.size()));
}

double RegretWeights::act_cost(std::span<const double> du) const {
  return quadratic<double>(Qu_, diagonal_, du.data(), static_cast<int>(du.size()));
}

template <class S>
S PlanObjective::rollout(std::span<const S> correction, Tick from, std::span<const double> x0, double loss_before,
                         std::vector<double>* states, std::vector<double>* losses) const {
  const auto& f = *p_.model;
  const int n = f.state_dim();
  const int m = f.act_dim();
  std::vector<S> x(static_cast<std::size_t>(n)), xn(static_cast<std::size_t>(n));
  std::vector<S> u(static_cast<std::size_t>(m)), du(static_cast<std::size_t>(m)), dx(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) x[static_cast<std::size_t>(c)] = S(x0[static_cast<std::size_t>(c)]);
  S loss(loss_before);
  const Tick ticks = p_.ticks();
  const auto record = [&](Tick k) {
    if constexpr (std::is_same_v<S, double>) {
      if (states) std::copy(x.begin(), x.end(), states->begin() + k * n);
      if (losses) (*losses)[static_cast<std::size_t>(k)] = loss;
    }
  };
  for (Tick k = from; k < ticks; ++k) {
    record(k);
    const auto block = static_cast<std::size_t>(k / p_.interval) * static_cast<std::size_t>(m);
    const double* ur = p_.u_ref + k * m;
    for (int c = 0; c < m; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      u[cc] = optim::saturate(S(correction[block + cc] + ur[c]), p_.lower[cc], p_.upper[cc], p_.clamp_width);
      du[cc] = u[cc] - ur[c];
    }
    loss += quadratic<S>(w_.Qu(), w_.diagonal(), du.data(), m);
    f.step(std::span<const S>(x), std::span<const S>(u), p_.start + k, std::span<S>(xn));
    const double* xr = p_.x_ref + (k + 1) * n;
    for (int c = 0; c < n; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      dx[cc] = xn[cc] - xr[c];
      if (f.is_angle(c)) dx[cc] = optim::wrap_angle(dx[cc]);
    }
    loss += quadratic<S>(w_.Qx(), w_.diagonal(), dx.data(), n);
    x.swap(xn);
  }
  return loss;
}

template <class S>
S PlanObjective::evaluate(std::span<const S> correction) const {
  return rollout<S>(correction, 0, as_span(p_.x_start), 0.0, nullptr, nullptr);
}

template double PlanObjective::evaluate<double>(std::span<const double>) const;
template Dual PlanObjective::evaluate<Dual>(std::span<const Dual>) const;

// Decision block b only influences ticks from b * interval on, so each chunk of
// derivative lanes starts from the cached scalar prefix at its first block.
double PlanObjective::value_and_gradient(std::span<const double> x, std::span<double> grad) const {
  const int n = p_.model->state_dim();
  const int m = p_.model->act_dim();
  const int dim = dimension();
  const Tick ticks = p_.ticks();
  std::vector<double> states(static_cast<std::size_t>(ticks * n));
  std::vector<double> losses(static_cast<std::size_t>(ticks));
  const double value = rollout<double>(x, 0, as_span(p_.x_start), 0.0, &states, &losses);
  std::vector<Dual> seeded(x.size());
  for (int base = 0; base < dim; base += optim::kChunk) {
    for (int i = 0; i < dim; ++i) {
      auto& s = seeded[static_cast<std::size_t>(i)];
      s = Dual(x[static_cast<std::size_t>(i)]);
      const int lane = i - base;
      if (lane >= 0 && lane < optim::kChunk) s.d[static_cast<std::size_t>(lane)] = 1.0;
    }
    const Tick from = static_cast<Tick>(base / m) * p_.interval;
    const Dual out = rollout<Dual>(seeded, from, std::span<const double>(states.data() + from * n, n),
                                   losses[static_cast<std::size_t>(from)], nullptr, nullptr);
    for (int lane = 0; lane < optim::kChunk && base + lane < dim; ++lane) {
      grad[static_cast<std::size_t>(base + lane)] = out.d[static_cast<std::size_t>(lane)];
    }
  }
  return value;
}

Vec PlanObjective::actuation(std::span<const double> correction, Tick k) const {
  const int m = p_.model->act_dim();
  const auto block = static_cast<std::size_t>(k / p_.interval) * static_cast<std::size_t>(m);
  Vec u(m);
  for (int c = 0; c < m; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    u[c] = optim::saturate(correction[block + cc] + p_.u_ref[k * m + c], p_.lower[cc], p_.upper[cc], p_.clamp_width);
  }
  return u;
}

PlanResult local_plan(const PlanProblem& problem, const RegretWeights& weights, const Vec& warm_start,
                      const optim::LbfgsOptions& options) {
  OV_EXPECTS(problem.model && problem.x_ref && problem.u_ref, "incomplete plan problem");
  OV_EXPECTS(problem.horizon >= 1 && problem.interval >= 1, "horizon and interval must be positive");
  const int m = problem.model->act_dim();
  OV_EXPECTS(static_cast<int>(problem.lower.size()) == m && static_cast<int>(problem.upper.size()) == m,
             "actuation bounds do not match the model");
  const PlanObjective objective(problem, weights);
  const int dim = objective.dimension();

  PlanResult r;
  const Vec zero = Vec::Zero(dim);
  r.zero_loss = objective.value(as_span(zero));
  r.warm_loss = std::numeric_limits<double>::infinity();
  if (warm_start.size() == dim) r.warm_loss = objective.value(as_span(warm_start));
  const Vec& x0 = r.warm_loss < r.zero_loss ? warm_start : zero;

  const auto res = optim::lbfgs_minimize(objective, x0, options);
  r.correction = res.x;
  r.loss = res.loss;
  r.reason = res.reason;
  r.iterations = res.iterations;
  r.flagged = !res.converged();
  return r;
}

Vec shift_warm_start(const Vec& correction, int act_dim) {
  const Eigen::Index n = correction.size();
  Vec out(n);
  if (n == 0) return out;
  out.head(n - act_dim) = correction.tail(n - act_dim);
  out.tail(act_dim) = correction.tail(act_dim);
  return out;
}

}  // namespace onevision::frameworks
