#include "onevision/frameworks/knowledge.hpp"

#include <string>

namespace onevision::frameworks {

FleetKnowledge::FleetKnowledge(int self, FleetLayout layout, DelaySpec delays, FleetSnapshot initial)
    : self_(self), layout_(layout), delays_(delays), initial_(std::move(initial)) {
  OV_EXPECTS(self >= 0 && self < layout_.agents, "agent index out of range");
  OV_EXPECTS(initial_.x.size() == layout_.fleet_state_dim() && initial_.z.size() == layout_.fleet_obs_dim(),
             "initial snapshot does not match the layout");
  if (initial_.u.size() != layout_.fleet_act_dim()) initial_.u = Vec::Zero(layout_.fleet_act_dim());
  for (int i = 0; i < layout_.agents; ++i) {
    x_.emplace_back(layout_.state_dim);
    z_.emplace_back(layout_.obs_dim);
    u_.emplace_back(layout_.act_dim);
    dx_.emplace_back(layout_.state_dim);
    dz_.emplace_back(layout_.obs_dim);
  }
  zero_x_.assign(static_cast<std::size_t>(layout_.state_dim), 0.0);
  zero_z_.assign(static_cast<std::size_t>(layout_.obs_dim), 0.0);
  set_now(0);
}

void FleetKnowledge::set_now(Tick now) {
  now_ = now;
  cutoffs_ = available_history(self_, layout_.agents, now, delays_);
}

void FleetKnowledge::record_own_sample(Tick t, std::span<const double> x, std::span<const double> z,
                                       const FleetModel& model) {
  auto& xs = x_[static_cast<std::size_t>(self_)];
  auto& zs = z_[static_cast<std::size_t>(self_)];
  xs.write(t, x);
  zs.write(t, z);
  if (t >= 1) {
    const Tick p = t - 1;
    const auto& f = model.agent_model(self_);
    const Vec xp = xs.vec(p);
    const Vec up = u_[static_cast<std::size_t>(self_)].vec(p);
    const Vec pred = f.step(xp, up, p);
    Vec d(pred.size());
    dynamics::state_difference(f, x, as_span(pred), as_span(d));
    dx_[static_cast<std::size_t>(self_)].write(p, as_span(d));
    const Vec zp = zs.vec(p);
    const Vec zpred = model.h[static_cast<std::size_t>(self_)]->step(zp, p);
    Vec dzv = to_vec(z) - zpred;
    dz_[static_cast<std::size_t>(self_)].write(p, as_span(dzv));
  }
}

void FleetKnowledge::record_own_actuation(Tick start, const Trajectory& u) {
  auto& us = u_[static_cast<std::size_t>(self_)];
  for (Tick t = 0; t < static_cast<Tick>(u.size()); ++t) us.write(start + t, u.at(u.start() + t));
}

void FleetKnowledge::ingest(const Message& message) {
  for (const auto& s : message.segments) {
    const int agent = static_cast<int>(s.agent);
    OV_EXPECTS(agent >= 0 && agent < layout_.agents && agent != self_, "segment for an unexpected agent");
    std::vector<Trajectory>* store = nullptr;
    switch (s.kind) {
      case SegmentKind::State: store = &x_; break;
      case SegmentKind::Observation: store = &z_; break;
      case SegmentKind::Actuation: store = &u_; break;
      case SegmentKind::StateDelta: store = &dx_; break;
      case SegmentKind::ObservationDelta: store = &dz_; break;
    }
    auto& tr = (*store)[static_cast<std::size_t>(agent)];
    OV_EXPECTS(static_cast<int>(s.dim) == tr.dim(), "segment dimension mismatch");
    for (std::uint32_t k = 0; k < s.count(); ++k) {
      tr.write(s.start + k, std::span<const double>(s.values.data() + static_cast<std::size_t>(k) * s.dim, s.dim));
    }
  }
}

Tick FleetKnowledge::cutoff(Kind kind, int agent) const {
  const bool own = agent == self_;
  switch (kind) {
    case Kind::X: return own ? cutoffs_.own_x : cutoffs_.other_x;
    case Kind::Z: return own ? cutoffs_.own_z : cutoffs_.other_z;
    case Kind::U: return own ? cutoffs_.own_u : cutoffs_.other_u;
    case Kind::DX:
    case Kind::DZ: return own ? cutoffs_.own_delta : cutoffs_.other_delta;
  }
  return -1;
}

std::span<const double> FleetKnowledge::read(Kind kind, int agent, Tick t) const {
  OV_EXPECTS(agent >= 0 && agent < layout_.agents, "agent index out of range");
  if (t > cutoff(kind, agent)) {
    ++violations_;
    throw CausalityViolation("agent " + std::to_string(self_) + " read tick " + std::to_string(t) + " of agent " +
                             std::to_string(agent) + " at " + std::to_string(now_) + " beyond its cutoff");
  }
  if (t < 0) {
    switch (kind) {
      case Kind::X: return agent_block(as_span(initial_.x), agent, layout_.state_dim);
      case Kind::Z: return agent_block(as_span(initial_.z), agent, layout_.obs_dim);
      case Kind::U: return agent_block(as_span(initial_.u), agent, layout_.act_dim);
      case Kind::DX: return zero_x_;
      case Kind::DZ: return zero_z_;
    }
  }
  const std::vector<Trajectory>* store = nullptr;
  switch (kind) {
    case Kind::X: store = &x_; break;
    case Kind::Z: store = &z_; break;
    case Kind::U: store = &u_; break;
    case Kind::DX: store = &dx_; break;
    case Kind::DZ: store = &dz_; break;
  }
  const auto& tr = (*store)[static_cast<std::size_t>(agent)];
  OV_EXPECTS(tr.contains(t), "history missing although it should be available");
  return tr.at(t);
}

std::span<const double> FleetKnowledge::x(int agent, Tick t) const { return read(Kind::X, agent, t); }
std::span<const double> FleetKnowledge::z(int agent, Tick t) const { return read(Kind::Z, agent, t); }
std::span<const double> FleetKnowledge::u(int agent, Tick t) const { return read(Kind::U, agent, t); }
std::span<const double> FleetKnowledge::dx(int agent, Tick t) const { return read(Kind::DX, agent, t); }
std::span<const double> FleetKnowledge::dz(int agent, Tick t) const { return read(Kind::DZ, agent, t); }

}  // namespace onevision::frameworks
