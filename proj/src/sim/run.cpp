#include "onevision/sim/run.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

#include "onevision/controllers/formation.hpp"
#include "onevision/dynamics/vehicles.hpp"
#include "onevision/frameworks/knowledge.hpp"
#include "onevision/sim/channel.hpp"
#include "onevision/sim/engine.hpp"

namespace onevision::sim {

using dynamics::DisturbanceRealization;
using frameworks::RegretWeights;

DelaySpec RunConfig::delays() const {
  return DelaySpec::from_ms(obs_ms, act_ms, comm_ms, control_rate_hz, base_rate_hz);
}

Tick RunConfig::ticks() const { return ticks_from_seconds(duration_s, base_rate_hz); }

TaskParams RunConfig::task_params() const { return {accel_ratio, wheelbase_ratio, base_rate_hz}; }

frameworks::FrameworkOptions RunConfig::framework_options(const FleetLayout& layout) const {
  frameworks::FrameworkOptions o;
  o.weights = RegretWeights(q_x * Mat::Identity(layout.state_dim, layout.state_dim),
                            q_u * Mat::Identity(layout.act_dim, layout.act_dim));
  o.horizon = horizon;
  o.lbfgs.memory = lbfgs_memory;
  o.lbfgs.g_tol = lbfgs_g_tol;
  o.lbfgs.max_iters = lbfgs_max_iters;
  o.clamp_width = clamp_width;
  return o;
}

void RunConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
  };
  require(base_rate_hz > 0, "sim.base_rate_hz", "must be positive");
  require(control_rate_hz > 0 && base_rate_hz % control_rate_hz == 0, "sim.control_rate_hz",
          "must divide the base rate");
  require(duration_s > 0.0, "sim.duration_s", "must be positive");
  require(sensor_noise >= 0.0, "noise.sensor", "must be non-negative");
  require(disturbance_noise >= 0.0, "noise.disturbance", "must be non-negative");
  require(accel_ratio > 0.0, "model.accel_ratio", "must be positive");
  require(wheelbase_ratio > 0.0, "model.wheelbase_ratio", "must be positive");
  require(horizon >= 1, "plan.horizon", "must be at least 1");
  require(q_x >= 0.0, "plan.q_x", "must be non-negative");
  require(q_u > 0.0, "plan.q_u", "must be positive");
  require(lbfgs_memory >= 1, "optim.memory", "must be at least 1");
  require(lbfgs_max_iters >= 0, "optim.max_iters", "must be non-negative");
  require(lbfgs_g_tol >= 0.0, "optim.g_tol", "must be non-negative");
  require(clamp_width > 0.0, "optim.clamp_width", "must be positive");
  const auto at_least_one_tick = [&](double ms) {
    if (ticks_from_ms(ms, base_rate_hz) < 1) throw std::invalid_argument("must be at least one tick");
  };
  const auto named = [](const char* field, auto&& check) {
    try {
      check();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(field) + ": " + e.what());
    }
  };
  named("sim.task", [&] { task_from_string(task); });
  named("sim.framework", [&] { frameworks::framework_from_string(framework); });
  named("delay.obs_ms", [&] { at_least_one_tick(obs_ms); });
  named("delay.act_ms", [&] { at_least_one_tick(act_ms); });
  named("delay.comm_ms", [&] { at_least_one_tick(comm_ms); });
  named("sim.duration_s", [&] { ticks(); });
}

DisturbanceRealization sample_realization(const Task& task, const RunConfig& config) {
  const Tick T = config.ticks();
  std::mt19937_64 rng(config.seed);
  DisturbanceRealization r = DisturbanceRealization::zeros(task.layout.agents, task.layout.state_dim,
                                                           task.layout.obs_dim, T);
  r.seed = config.seed;
  const std::vector<bool> all(static_cast<std::size_t>(task.layout.state_dim), true);
  for (int i = 0; i < task.layout.agents; ++i) {
    r.dx[static_cast<std::size_t>(i)] =
        dynamics::sample_noise(config.disturbance_noise, config.base_rate_hz, T, task.disturbance_mask, rng);
    r.sensor[static_cast<std::size_t>(i)] = dynamics::sample_noise(config.sensor_noise, config.base_rate_hz, T, all, rng);
  }
  return r;
}

namespace {

// Advances the true fleet one tick: x(t+1) = f(x, u, t) + dx(t),
// z(t+1) = h(z, x, t) + dz(t).
void true_step(const Task& task, const DisturbanceRealization& r, const Vec& x, const Vec& z, const Vec& u, Tick t,
               Vec& xn, Vec& zn) {
  const auto& l = task.layout;
  for (int i = 0; i < l.agents; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const auto& f = *task.truth[ii];
    auto xb = agent_block(as_span(xn), i, l.state_dim);
    f.step(agent_block(as_span(x), i, l.state_dim), agent_block(as_span(u), i, l.act_dim), t, xb);
    const auto d = r.dx[ii].at(t);
    for (int k = 0; k < l.state_dim; ++k) xb[static_cast<std::size_t>(k)] += d[static_cast<std::size_t>(k)];
    dynamics::wrap_angles(f, xb);
    auto zb = agent_block(as_span(zn), i, l.obs_dim);
    task.true_obs(i, agent_block(as_span(z), i, l.obs_dim), as_span(x), t, zb);
    const auto dz = r.dz[ii].at(t);
    for (int k = 0; k < l.obs_dim; ++k) zb[static_cast<std::size_t>(k)] += dz[static_cast<std::size_t>(k)];
  }
}

void check_realization(const Task& task, const DisturbanceRealization& r, Tick ticks) {
  const auto n = static_cast<std::size_t>(task.layout.agents);
  if (r.dx.size() != n || r.dz.size() != n || r.sensor.size() != n) {
    throw std::invalid_argument("disturbance realization has the wrong number of agents");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(r.dx[i].start() <= 0 && r.dx[i].end() >= ticks && r.dz[i].start() <= 0 && r.dz[i].end() >= ticks &&
          r.sensor[i].start() <= 0 && r.sensor[i].end() >= ticks)) {
      throw std::invalid_argument("disturbance realization does not cover the run");
    }
  }
}

FleetTrajectory empty_fleet(const FleetLayout& l) {
  return {l, Trajectory(l.fleet_state_dim()), Trajectory(l.fleet_obs_dim()), Trajectory(l.fleet_act_dim())};
}

}  // namespace

FleetTrajectory ideal_oracle(const Task& task, Tick control_interval, const DisturbanceRealization& realization,
                             Tick ticks) {
  check_realization(task, realization, ticks);
  const auto& l = task.layout;
  FleetTrajectory out = empty_fleet(l);
  out.x.reserve(static_cast<std::size_t>(ticks + 1));
  out.z.reserve(static_cast<std::size_t>(ticks + 1));
  out.u.reserve(static_cast<std::size_t>(ticks));
  Vec x = task.initial.x, z = task.initial.z;
  Vec u = Vec::Zero(l.fleet_act_dim());
  Vec xn(x.size()), zn(z.size());
  out.x.push_back(x);
  out.z.push_back(z);
  for (Tick t = 0; t < ticks; ++t) {
    if (t % control_interval == 0) task.pi->act(as_span(x), as_span(z), t, as_span(u));
    out.u.push_back(u);
    true_step(task, realization, x, z, u, t, xn, zn);
    x.swap(xn);
    z.swap(zn);
    out.x.push_back(x);
    out.z.push_back(z);
  }
  return out;
}

double regret_loss(const Task& task, const RegretWeights& weights, std::span<const double> x,
                   std::span<const double> x_ideal, std::span<const double> u, std::span<const double> u_ideal) {
  const auto& l = task.layout;
  Vec dx(l.state_dim), du(l.act_dim);
  double total = 0.0;
  for (int i = 0; i < l.agents; ++i) {
    dynamics::state_difference(*task.truth[static_cast<std::size_t>(i)], agent_block(x, i, l.state_dim),
                               agent_block(x_ideal, i, l.state_dim), as_span(dx));
    const auto ua = agent_block(u, i, l.act_dim);
    const auto ub = agent_block(u_ideal, i, l.act_dim);
    for (int k = 0; k < l.act_dim; ++k) du[k] = ua[static_cast<std::size_t>(k)] - ub[static_cast<std::size_t>(k)];
    total += weights.state_cost(as_span(dx)) + weights.act_cost(as_span(du));
  }
  return total;
}

void compute_metrics(RunLog& log, const Task& task, const RegretWeights& weights, Tick from) {
  const Tick T = static_cast<Tick>(log.actual.u.size());
  log.regret.assign(static_cast<std::size_t>(T), 0.0);
  for (Tick t = 0; t < T; ++t) {
    log.regret[static_cast<std::size_t>(t)] =
        regret_loss(task, weights, log.actual.x.at(t), log.ideal.x.at(t), log.actual.u.at(t), log.ideal.u.at(t));
  }
  Metrics m;
  double sum = 0.0;
  Tick count = 0;
  for (Tick t = std::max<Tick>(from, 0); t < T; ++t, ++count) sum += log.regret[static_cast<std::size_t>(t)];
  m.avg_regret = count > 0 ? sum / static_cast<double>(count) : 0.0;
  m.log_loss = std::log10(m.avg_regret);

  if (task.metric == TaskMetric::Distance && T > 0) {
    double acc = 0.0;
    for (Tick t = 0; t < T; ++t) {
      const auto x = log.actual.x.at(t);
      const double e = x[0] - x[2] - task.gap_reference;
      acc += e * e;
    }
    m.avg_distance = std::sqrt(acc / static_cast<double>(T));
  }
  if (task.metric == TaskMetric::Deviation && task.formation && T > 0) {
    const auto& l = task.layout;
    double acc = 0.0;
    for (Tick t = 0; t < T; ++t) {
      const auto x = log.actual.x.at(t);
      const auto z = log.actual.z.at(t);
      const auto id = controllers::formation_from_code(z[controllers::FormationController::kObsFormation]);
      const auto leader = agent_block(x, 0, l.state_dim);
      for (int i = 1; i < l.agents; ++i) {
        const auto slot = task.formation->slot_position(leader, id, i);
        const auto me = agent_block(x, i, l.state_dim);
        const double ex = me[dynamics::Car2D::kPx] - slot[0];
        const double ey = me[dynamics::Car2D::kPy] - slot[1];
        acc += ex * ex + ey * ey;
      }
    }
    m.avg_deviation = std::sqrt(acc / (static_cast<double>(T) * (l.agents - 1)));
  }
  log.metrics = m;
}

struct Engine::State {
  const Task& task;
  const DisturbanceRealization& realization;
  DelaySpec delays;
  frameworks::FrameworkOptions options;
  FleetTrajectory actual;
  Vec x, z, u, xn, zn;
  std::vector<std::unique_ptr<frameworks::AgentController>> agents;
  std::vector<Trajectory> schedule;
  DelayedChannel<std::vector<std::uint8_t>> channel;
  RunDiagnostics diag;
  Tick now = 0;

  State(const Task& t, const DisturbanceRealization& r, const DelaySpec& d)
      : task(t), realization(r), delays(d), channel(d.comm()) {}
};

Engine::Engine(const Task& task, const RunConfig& config, const ScenarioOverrides& overrides,
               const DisturbanceRealization& realization) {
  task.validate();
  const auto& l = task.layout;
  const DelaySpec base = config.delays();
  const Tick ci = overrides.control_interval.value_or(base.control_interval());
  s_ = std::make_unique<State>(task, realization, DelaySpec(base.obs(), base.act(), base.comm(), ci));
  auto& s = *s_;
  s.options = config.framework_options(l);
  if (overrides.weights) s.options.weights = *overrides.weights;
  s.options.record_trace = overrides.record_trace;
  const auto framework = frameworks::framework_from_string(config.framework);

  s.actual = empty_fleet(l);
  s.x = task.initial.x;
  if (overrides.initial_offset.size() == s.x.size()) s.x += overrides.initial_offset;
  s.z = task.initial.z;
  s.actual.x.push_back(s.x);
  s.actual.z.push_back(s.z);
  s.u.resize(l.fleet_act_dim());
  s.xn.resize(s.x.size());
  s.zn.resize(s.z.size());

  FleetSnapshot agent_view = task.initial;
  if (overrides.agent_init_error.size() == agent_view.x.size()) agent_view.x += overrides.agent_init_error;
  if (agent_view.u.size() != l.fleet_act_dim()) agent_view.u = task.pi->act(agent_view.x, agent_view.z, 0);
  auto model = std::make_shared<const frameworks::FleetModel>(task.fleet_model(ci));
  for (int i = 0; i < l.agents; ++i) {
    s.agents.push_back(frameworks::make_agent(framework, i, model, s.delays, s.options, agent_view));
    s.schedule.emplace_back(l.act_dim, 0);
  }
  for (int i = 0; i < l.agents; ++i) {
    const auto c = s.agents[static_cast<std::size_t>(i)]->initialize();
    for (Tick t = 0; t < static_cast<Tick>(c.u.size()); ++t) s.schedule[static_cast<std::size_t>(i)].write(c.start + t, c.u.at(t));
  }
}

Engine::~Engine() = default;

void Engine::step() {
  auto& s = *s_;
  const auto& l = s.task.layout;
  const Tick now = s.now;
  std::vector<frameworks::Message> delivered;
  for (const auto& bytes : s.channel.deliver(now)) delivered.push_back(frameworks::decode(bytes));
  for (int i = 0; i < l.agents; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    std::vector<frameworks::Message> inbox;
    for (const auto& m : delivered) {
      if (m.sender != i) inbox.push_back(m);
    }
    std::optional<frameworks::Sample> sample;
    const Tick m = now - s.delays.obs();
    if (m >= 0) {
      frameworks::Sample smp;
      smp.tick = m;
      smp.x = to_vec(agent_block(s.actual.x.at(m), i, l.state_dim)) + s.realization.sensor[ii].vec(m);
      smp.z = to_vec(agent_block(s.actual.z.at(m), i, l.obs_dim));
      sample = std::move(smp);
    }
    auto out = s.agents[ii]->step(now, sample, inbox);
    if (out.commit) {
      ++s.diag.replans;
      if (out.flagged) ++s.diag.flagged_plans;
      auto& sch = s.schedule[ii];
      OV_EXPECTS(out.commit->start == sch.end(), "commit leaves a gap in the actuation schedule");
      for (Tick t = 0; t < static_cast<Tick>(out.commit->u.size()); ++t) sch.push_back(out.commit->u.at(t));
    }
    auto bytes = frameworks::encode(out.message);
    s.diag.max_message_bytes = std::max(s.diag.max_message_bytes, bytes.size());
    s.channel.send(now, std::move(bytes));
  }
  for (int i = 0; i < l.agents; ++i) {
    const auto& sch = s.schedule[static_cast<std::size_t>(i)];
    OV_EXPECTS(sch.contains(now), "no actuation scheduled for the current tick");
    const auto v = sch.at(now);
    std::copy(v.begin(), v.end(), agent_block(as_span(s.u), i, l.act_dim).begin());
  }
  s.actual.u.push_back(s.u);
  true_step(s.task, s.realization, s.x, s.z, s.u, now, s.xn, s.zn);
  s.x.swap(s.xn);
  s.z.swap(s.zn);
  s.actual.x.push_back(s.x);
  s.actual.z.push_back(s.z);
  ++s.now;
}

Tick Engine::now() const { return s_->now; }
const FleetTrajectory& Engine::actual() const { return s_->actual; }
const DelaySpec& Engine::delays() const { return s_->delays; }
const frameworks::FrameworkOptions& Engine::options() const { return s_->options; }

RunDiagnostics Engine::diagnostics() const {
  RunDiagnostics d = s_->diag;
  d.messages = s_->channel.sent();
  d.channel_max_error = s_->channel.max_error();
  for (const auto& a : s_->agents) d.causality_violations += a->knowledge().violations();
  return d;
}

std::vector<frameworks::ReplanRecord> Engine::trace() const {
  std::vector<frameworks::ReplanRecord> out;
  for (const auto& a : s_->agents) {
    const auto& tr = a->trace();
    out.insert(out.end(), tr.begin(), tr.end());
  }
  return out;
}

RunLog simulate(const Task& task, const RunConfig& config, const ScenarioOverrides& overrides) {
  task.validate();
  const Tick T = config.ticks();
  const Tick ci = overrides.control_interval.value_or(config.delays().control_interval());

  RunLog log;
  log.config = config;
  log.realization = overrides.realization ? *overrides.realization : sample_realization(task, config);
  check_realization(task, log.realization, T);
  log.ideal = ideal_oracle(task, ci, log.realization, T);

  std::optional<Engine> engine;
  std::string error;
  try {
    engine.emplace(task, config, overrides, log.realization);
    while (engine->now() < T) engine->step();
  } catch (const std::exception& e) {
    error = e.what();
  }
  if (engine) {
    log.actual = engine->actual();
    log.diagnostics = engine->diagnostics();
    log.trace = engine->trace();
  } else {
    log.actual = empty_fleet(task.layout);
  }
  auto& diag = log.diagnostics;
  diag.failed = !error.empty();
  diag.error = error;
  diag.checksum_actual = checksum(log.actual);
  diag.checksum_ideal = checksum(log.ideal);
  if (diag.failed) {
    log.metrics.avg_regret = log.metrics.log_loss = std::numeric_limits<double>::quiet_NaN();
    return log;
  }
  compute_metrics(log, task, engine->options().weights);
  return log;
}

RunLog run_simulation(const RunConfig& config) {
  config.validate();
  const Task task = make_task(task_from_string(config.task), config.task_params());
  return simulate(task, config);
}

}  // namespace onevision::sim
