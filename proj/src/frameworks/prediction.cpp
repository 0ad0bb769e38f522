#include "onevision/frameworks/prediction.hpp"

#include <algorithm>

namespace onevision::frameworks {

IdealState IdealState::initial(const FleetSnapshot& snapshot, const FleetLayout& layout) {
  IdealState s;
  s.tick = 0;
  s.x = snapshot.x;
  s.z = snapshot.z;
  s.u_hold = snapshot.u.size() == layout.fleet_act_dim() ? snapshot.u : Vec::Zero(layout.fleet_act_dim());
  return s;
}

IdealPrediction roll_ideal(const FleetModel& model, const IdealState& from, Tick end, const DeltaSource& delta) {
  const auto& l = model.layout;
  OV_EXPECTS(end >= from.tick, "prediction must not end before it starts");
  IdealPrediction p;
  p.start = from.tick;
  p.x = Trajectory(l.fleet_state_dim(), from.tick);
  p.z = Trajectory(l.fleet_obs_dim(), from.tick);
  p.u = Trajectory(l.fleet_act_dim(), from.tick);
  const auto steps = static_cast<std::size_t>(end - from.tick);
  p.x.reserve(steps + 1);
  p.z.reserve(steps + 1);
  p.u.reserve(steps);

  Vec x = from.x, z = from.z, u = from.u_hold;
  Vec xn(x.size()), zn(z.size());
  Vec dx(l.state_dim), dz(l.obs_dim);
  p.x.push_back(x);
  p.z.push_back(z);
  for (Tick t = from.tick; t < end; ++t) {
    model.control(as_span(x), as_span(z), t, as_span(u));
    p.u.push_back(u);
    model.step_state(as_span(x), as_span(u), t, as_span(xn));
    model.step_obs(as_span(z), t, as_span(zn));
    if (delta) {
      for (int i = 0; i < l.agents; ++i) {
        if (!delta(i, t, as_span(dx), as_span(dz))) continue;
        xn.segment(static_cast<Eigen::Index>(i) * l.state_dim, l.state_dim) += dx;
        zn.segment(static_cast<Eigen::Index>(i) * l.obs_dim, l.obs_dim) += dz;
      }
    }
    model.wrap(as_span(xn));
    x.swap(xn);
    z.swap(zn);
    p.x.push_back(x);
    p.z.push_back(z);
  }
  p.u_hold = u;
  return p;
}

IdealState state_at_end(const IdealPrediction& prediction) {
  IdealState s;
  s.tick = prediction.end();
  s.x = prediction.x.vec(s.tick);
  s.z = prediction.z.vec(s.tick);
  s.u_hold = prediction.u_hold;
  return s;
}

namespace {

void copy_deltas(const FleetKnowledge& k, int agent, Tick t, std::span<double> dx, std::span<double> dz) {
  const auto a = k.dx(agent, t);
  const auto b = k.dz(agent, t);
  std::copy(a.begin(), a.end(), dx.begin());
  std::copy(b.begin(), b.end(), dz.begin());
}

}  // namespace

DeltaSource available_deltas(const FleetKnowledge& knowledge, Tick now) {
  const int self = knowledge.self();
  const Tick own_end = now - knowledge.delays().obs();
  const Tick shared = knowledge.delays().prediction_start(now);
  return [&knowledge, self, own_end, shared](int agent, Tick t, std::span<double> dx, std::span<double> dz) {
    if (!((agent == self && t < own_end) || t == shared)) return false;
    copy_deltas(knowledge, agent, t, dx, dz);
    return true;
  };
}

DeltaSource all_deltas(const FleetKnowledge& knowledge) {
  return [&knowledge](int agent, Tick t, std::span<double> dx, std::span<double> dz) {
    copy_deltas(knowledge, agent, t, dx, dz);
    return true;
  };
}

IdealPrediction forward_predict(const FleetModel& model, const FleetKnowledge& knowledge, IdealState& anchor,
                                Tick now, Tick end) {
  const Tick target = std::max<Tick>(knowledge.delays().prediction_start(now), 0);
  OV_EXPECTS(anchor.tick <= target, "anchor is ahead of the prediction start");
  if (anchor.tick < target) anchor = state_at_end(roll_ideal(model, anchor, target, all_deltas(knowledge)));
  return roll_ideal(model, anchor, end, available_deltas(knowledge, now));
}

Vec self_estimate(const dynamics::DynamicsModel& model, const Vec& x_from, Tick from, Tick to,
                  const std::function<std::span<const double>(Tick)>& u) {
  OV_EXPECTS(to >= from, "self estimate runs forward in time");
  Vec x = x_from;
  Vec next(x.size());
  for (Tick t = from; t < to; ++t) {
    model.step(as_span(x), u(t), t, as_span(next));
    x.swap(next);
  }
  return x;
}

}  // namespace onevision::frameworks
