#pragma once

#include <functional>

#include "onevision/frameworks/knowledge.hpp"

namespace onevision::frameworks {

/// Point on a (predicted) ideal fleet trajectory together with the
/// actuation held from the last lattice tick.
struct IdealState {
  Tick tick = 0;
  Vec x;
  Vec z;
  Vec u_hold;

  static IdealState initial(const FleetSnapshot& snapshot, const FleetLayout& layout);
};

/// Ideal fleet trajectory over [start, end]: x and z at every tick, u on [start, end).
struct IdealPrediction {
  Tick start = 0;
  Trajectory x;
  Trajectory z;
  Trajectory u;
  Vec u_hold;  ///< actuation held after the last step

  Tick end() const { return x.end() - 1; }
};

/// Writes agent `agent`'s disturbance at `t` into `out` and returns true
/// when it is to be injected; returning false means zero.
using DeltaSource = std::function<bool(int agent, Tick t, std::span<double> dx, std::span<double> dz)>;

/// Rolls the closed loop (f_hat, pi_c, h_hat) from `from` to tick `end`,
/// adding injected disturbances after each step.
IdealPrediction roll_ideal(const FleetModel& model, const IdealState& from, Tick end, const DeltaSource& delta);

/// State at the last tick of a prediction, ready to serve as an anchor.
IdealState state_at_end(const IdealPrediction& prediction);

/// Disturbance injection permitted at replan tick `now` for agent `self`:
/// own deltas for t < now - T^x, everyone's at t = now - T^x - T^c - 1.
DeltaSource available_deltas(const FleetKnowledge& knowledge, Tick now);
/// Every agent's measured delta at every tick (anchor advance).
DeltaSource all_deltas(const FleetKnowledge& knowledge);

/// Forward prediction for a replan at `now`: advances `anchor` to
/// max(now - T^x - T^c - 1, 0) and rolls to `end` with the permitted deltas.
IdealPrediction forward_predict(const FleetModel& model, const FleetKnowledge& knowledge, IdealState& anchor,
                                Tick now, Tick end);

/// Dead-reckons an agent state from `from` to `to` with f_hat and the
/// recorded actuation.
Vec self_estimate(const dynamics::DynamicsModel& model, const Vec& x_from, Tick from, Tick to,
                  const std::function<std::span<const double>(Tick)>& u);

}  // namespace onevision::frameworks
