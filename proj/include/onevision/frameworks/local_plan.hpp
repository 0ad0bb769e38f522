#pragma once

#include <vector>

#include "onevision/dynamics/model.hpp"
#include "onevision/optim/lbfgs.hpp"

namespace onevision::frameworks {

/// Quadratic regret weights for one agent: Qx positive semi-definite,
/// Qu positive definite.
class RegretWeights {
 public:
  RegretWeights(Mat Qx, Mat Qu);
  static RegretWeights identity(int state_dim, int act_dim, double qu = 0.1);

  const Mat& Qx() const { return Qx_; }
  const Mat& Qu() const { return Qu_; }
  bool diagonal() const { return diagonal_; }

  /// a' B a for the state and actuation parts.
  double state_cost(std::span<const double> dx) const;
  double act_cost(std::span<const double> du) const;

 private:
  Mat Qx_;
  Mat Qu_;
  bool diagonal_ = false;
};

/// Local planning problem over [start, start + horizon * interval).
/// The decision vector holds one correction per control period, added to
/// the predicted ideal actuation and saturated.
struct PlanProblem {
  const dynamics::DynamicsModel* model = nullptr;
  Vec x_start;
  Tick start = 0;
  int horizon = 20;
  Tick interval = 5;
  const double* x_ref = nullptr;  ///< (horizon*interval + 1) * state_dim, tick-major
  const double* u_ref = nullptr;  ///< horizon*interval * act_dim
  std::vector<double> lower;
  std::vector<double> upper;
  double clamp_width = 0.01;

  int decision_dim() const { return horizon * model->act_dim(); }
  Tick ticks() const { return static_cast<Tick>(horizon) * interval; }
};

class PlanObjective final : public optim::ObjectiveFunction {
 public:
  PlanObjective(const PlanProblem& problem, const RegretWeights& weights) : p_(problem), w_(weights) {}
  int dimension() const override { return p_.decision_dim(); }
  double value(std::span<const double> x) const override { return evaluate<double>(x); }
  double value_and_gradient(std::span<const double> x, std::span<double> grad) const override;

  template <class S>
  S evaluate(std::span<const S> correction) const;

  /// Loss accumulated over ticks [from, end) starting from state `x` at `from`.
  /// When `states` is set, records the state and running loss at every tick.
  template <class S>
  S rollout(std::span<const S> correction, Tick from, std::span<const double> x, double loss_before,
            std::vector<double>* states, std::vector<double>* losses) const;

  /// Actuation at tick `k` of the window for a given correction (hard clamp).
  Vec actuation(std::span<const double> correction, Tick k) const;

 private:
  const PlanProblem& p_;
  const RegretWeights& w_;
};

struct PlanResult {
  Vec correction;
  double loss = 0.0;
  double zero_loss = 0.0;
  double warm_loss = 0.0;
  optim::Termination reason = optim::Termination::GradientTolerance;
  int iterations = 0;
  bool flagged = false;  ///< optimizer stopped without converging
};

/// Minimizes the plan objective from the better of `warm_start` and zero.
PlanResult local_plan(const PlanProblem& problem, const RegretWeights& weights, const Vec& warm_start,
                      const optim::LbfgsOptions& options);

/// Shifts a plan by one control period, repeating the last correction.
Vec shift_warm_start(const Vec& correction, int act_dim);

}  // namespace onevision::frameworks
