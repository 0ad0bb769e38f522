#include "onevision/frameworks/agents.hpp"

#include <algorithm>
#include <stdexcept>

namespace onevision::frameworks {

AgentBase::AgentBase(int agent, std::shared_ptr<const FleetModel> model, const DelaySpec& delays,
                     FrameworkOptions options, const FleetSnapshot& initial)
    : agent_(agent),
      model_(std::move(model)),
      delays_(delays),
      options_(std::move(options)),
      knowledge_(agent, model_->layout, delays, initial) {
  OV_EXPECTS(model_->control_interval == delays.control_interval(), "model and delay spec disagree on the interval");
}

Commit AgentBase::initialize() {
  const auto& l = model_->layout;
  const auto p = roll_ideal(*model_, IdealState::initial(knowledge_.initial(), l), delays_.act(), {});
  Commit c{0, Trajectory(l.act_dim, 0)};
  for (Tick t = 0; t < delays_.act(); ++t) c.u.push_back(agent_block(p.u.at(t), agent_, l.act_dim));
  knowledge_.record_own_actuation(0, c.u);
  return c;
}

Message AgentBase::broadcast(Tick now) const {
  Message m;
  m.sender = agent_;
  m.sent = now;
  const auto a = static_cast<std::uint32_t>(agent_);
  auto segment = [&](SegmentKind kind, const Trajectory& tr, Tick t) {
    if (!tr.contains(t)) return;
    const auto v = tr.at(t);
    m.segments.push_back(Segment{kind, a, t, static_cast<std::uint32_t>(tr.dim()), {v.begin(), v.end()}});
  };
  const Tick sampled = now - delays_.obs();
  segment(SegmentKind::State, knowledge_.own_x(), sampled);
  segment(SegmentKind::Observation, knowledge_.own_z(), sampled);
  segment(SegmentKind::StateDelta, knowledge_.own_dx(), sampled - 1);
  segment(SegmentKind::ObservationDelta, knowledge_.own_dz(), sampled - 1);
  segment(SegmentKind::Actuation, knowledge_.own_u(), now);
  return m;
}

AgentOutput AgentBase::step(Tick now, const std::optional<Sample>& sample, std::span<const Message> inbox) {
  knowledge_.set_now(now);
  for (const auto& m : inbox) knowledge_.ingest(m);
  if (sample) knowledge_.record_own_sample(sample->tick, as_span(sample->x), as_span(sample->z), *model_);
  AgentOutput out;
  out.message = broadcast(now);
  if (delays_.is_replan_tick(now)) {
    out.commit = replan(now, out.flagged);
    knowledge_.record_own_actuation(out.commit->start, out.commit->u);
  }
  return out;
}

Vec AgentBase::estimate_own_state(Tick now, Tick to) const {
  const Tick sampled = now - delays_.obs();
  const Tick from = std::max<Tick>(sampled, 0);
  const Vec x0 = to_vec(knowledge_.x(agent_, sampled));
  return self_estimate(model_->agent_model(agent_), x0, from, to,
                       [this](Tick t) { return knowledge_.u(agent_, t); });
}

Vec AgentBase::estimate_own_obs(Tick now, Tick to) const {
  const Tick sampled = now - delays_.obs();
  Vec z = to_vec(knowledge_.z(agent_, sampled));
  Tick t = std::max<Tick>(sampled, 0);
  const auto& h = *model_->h[static_cast<std::size_t>(agent_)];
  for (; t < to; ++t) z = h.step(z, t);
  return z;
}

Commit AgentBase::hold(Tick start, const Vec& u) const {
  Commit c{start, Trajectory(static_cast<int>(u.size()), 0)};
  for (Tick k = 0; k < delays_.control_interval(); ++k) c.u.push_back(u);
  return c;
}

Commit OneVisionAgent::initialize() {
  anchor_ = IdealState::initial(knowledge_.initial(), model_->layout);
  return AgentBase::initialize();
}

Commit OneVisionAgent::replan(Tick now, bool& flagged) {
  const auto& l = model_->layout;
  const int n = l.state_dim;
  const int m = l.act_dim;
  const Tick ci = delays_.control_interval();
  const Tick w = now + delays_.act();
  const Tick end = w + static_cast<Tick>(options_.horizon) * ci;

  const IdealPrediction pred = forward_predict(*model_, knowledge_, anchor_, now, end);
  const Vec estimate = estimate_own_state(now, w);

  std::vector<double> x_ref, u_ref;
  x_ref.reserve(static_cast<std::size_t>((end - w + 1) * n));
  u_ref.reserve(static_cast<std::size_t>((end - w) * m));
  for (Tick t = w; t <= end; ++t) {
    const auto xs = agent_block(pred.x.at(t), agent_, n);
    x_ref.insert(x_ref.end(), xs.begin(), xs.end());
    if (t < end) {
      const auto us = agent_block(pred.u.at(t), agent_, m);
      u_ref.insert(u_ref.end(), us.begin(), us.end());
    }
  }

  PlanProblem problem;
  problem.model = &model_->agent_model(agent_);
  problem.x_start = estimate;
  problem.start = w;
  problem.horizon = options_.horizon;
  problem.interval = ci;
  problem.x_ref = x_ref.data();
  problem.u_ref = u_ref.data();
  problem.lower = model_->pi->act_lower();
  problem.upper = model_->pi->act_upper();
  problem.clamp_width = options_.clamp_width;

  const PlanResult plan = local_plan(problem, options_.weights, warm_, options_.lbfgs);
  flagged = plan.flagged;
  const PlanObjective objective(problem, options_.weights);
  Commit c{w, Trajectory(m, 0)};
  for (Tick k = 0; k < ci; ++k) c.u.push_back(objective.actuation(as_span(plan.correction), k));
  warm_ = shift_warm_start(plan.correction, m);

  if (options_.record_trace) {
    ReplanRecord r;
    r.agent = agent_;
    r.tick = now;
    r.anchor_tick = anchor_.tick;
    r.anchor_x = anchor_.x;
    r.estimate = estimate;
    r.ref_x = to_vec(std::span<const double>(x_ref.data(), static_cast<std::size_t>(n)));
    r.ref_u = to_vec(std::span<const double>(u_ref.data(), static_cast<std::size_t>(m)));
    r.applied = c.u.vec(0);
    r.loss = plan.loss;
    r.zero_loss = plan.zero_loss;
    r.iterations = plan.iterations;
    trace_.push_back(std::move(r));
  }
  return c;
}

Commit NaiveAgent::replan(Tick now, bool&) {
  const auto& l = model_->layout;
  Vec x(l.fleet_state_dim()), z(l.fleet_obs_dim());
  for (int j = 0; j < l.agents; ++j) {
    const Tick t = j == agent_ ? now - delays_.obs() : now - delays_.obs() - delays_.comm();
    const auto xs = knowledge_.x(j, t);
    const auto zs = knowledge_.z(j, t);
    std::copy(xs.begin(), xs.end(), agent_block(as_span(x), j, l.state_dim).begin());
    std::copy(zs.begin(), zs.end(), agent_block(as_span(z), j, l.obs_dim).begin());
  }
  const Vec u = model_->pi->act(x, z, now);
  return hold(now + delays_.act(), to_vec(agent_block(as_span(u), agent_, l.act_dim)));
}

Commit LocalAgent::replan(Tick now, bool&) {
  const auto& l = model_->layout;
  const Tick w = now + delays_.act();
  Vec x(l.fleet_state_dim()), z(l.fleet_obs_dim());
  for (int j = 0; j < l.agents; ++j) {
    auto xb = agent_block(as_span(x), j, l.state_dim);
    auto zb = agent_block(as_span(z), j, l.obs_dim);
    if (j == agent_) {
      const Vec xe = estimate_own_state(now, w);
      const Vec ze = estimate_own_obs(now, w);
      std::copy(xe.data(), xe.data() + xe.size(), xb.begin());
      std::copy(ze.data(), ze.data() + ze.size(), zb.begin());
    } else {
      const Tick t = now - delays_.obs() - delays_.comm();
      const auto xs = knowledge_.x(j, t);
      const auto zs = knowledge_.z(j, t);
      std::copy(xs.begin(), xs.end(), xb.begin());
      std::copy(zs.begin(), zs.end(), zb.begin());
    }
  }
  const Vec u = model_->pi->act(x, z, w);
  return hold(w, to_vec(agent_block(as_span(u), agent_, l.act_dim)));
}

Commit ConstUAgent::replan(Tick now, bool&) {
  const auto& l = model_->layout;
  const Tick w = now + delays_.act();
  const Tick last_u = now - delays_.comm();
  Vec x(l.fleet_state_dim()), z(l.fleet_obs_dim());
  for (int j = 0; j < l.agents; ++j) {
    auto xb = agent_block(as_span(x), j, l.state_dim);
    auto zb = agent_block(as_span(z), j, l.obs_dim);
    if (j == agent_) {
      const Vec xe = estimate_own_state(now, w);
      const Vec ze = estimate_own_obs(now, w);
      std::copy(xe.data(), xe.data() + xe.size(), xb.begin());
      std::copy(ze.data(), ze.data() + ze.size(), zb.begin());
      continue;
    }
    const Tick sampled = now - delays_.obs() - delays_.comm();
    const Tick from = std::max<Tick>(sampled, 0);
    const Vec x0 = to_vec(knowledge_.x(j, sampled));
    const Vec xe = self_estimate(model_->agent_model(j), x0, from, w, [this, j, last_u](Tick t) {
      return knowledge_.u(j, std::min(t, last_u));
    });
    Vec ze = to_vec(knowledge_.z(j, sampled));
    const auto& h = *model_->h[static_cast<std::size_t>(j)];
    for (Tick t = from; t < w; ++t) ze = h.step(ze, t);
    std::copy(xe.data(), xe.data() + xe.size(), xb.begin());
    std::copy(ze.data(), ze.data() + ze.size(), zb.begin());
  }
  const Vec u = model_->pi->act(x, z, w);
  return hold(w, to_vec(agent_block(as_span(u), agent_, l.act_dim)));
}

}  // namespace onevision::frameworks
