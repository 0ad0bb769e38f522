#include "onevision/sim/task.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "onevision/controllers/tasks1d.hpp"
#include "onevision/dynamics/vehicles.hpp"

namespace onevision::sim {

using controllers::FormationController;
using controllers::FormationId;
using dynamics::Car1D;
using dynamics::Car2D;
using dynamics::HoldObservation;

const char* to_string(TaskId id) {
  switch (id) {
    case TaskId::LeaderLinear: return "leader-linear";
    case TaskId::LeaderBangBang: return "leader-bangbang";
    case TaskId::FormationCircle: return "formation-circle";
    case TaskId::FormationSwitching: return "formation-switching";
  }
  return "unknown";
}

std::vector<TaskId> all_tasks() {
  return {TaskId::LeaderLinear, TaskId::LeaderBangBang, TaskId::FormationCircle, TaskId::FormationSwitching};
}

TaskId task_from_string(std::string_view name) {
  const auto tasks = all_tasks();
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    if (name == to_string(tasks[k]) || name == std::to_string(k + 1)) return tasks[k];
  }
  throw std::invalid_argument("unknown task id '" + std::string(name) +
                              "' (registered: leader-linear, leader-bangbang, formation-circle, formation-switching)");
}

frameworks::FleetModel Task::fleet_model(Tick control_interval) const {
  frameworks::FleetModel m;
  m.layout = layout;
  m.f = modeled;
  m.h = obs_model;
  m.pi = pi;
  m.control_interval = control_interval;
  return m;
}

void Task::validate() const {
  fleet_model(1).validate();
  if (static_cast<int>(truth.size()) != layout.agents) throw std::invalid_argument("one true model per agent required");
  if (!true_obs) throw std::invalid_argument("task needs a true observation step");
  if (initial.x.size() != layout.fleet_state_dim() || initial.z.size() != layout.fleet_obs_dim()) {
    throw std::invalid_argument("initial snapshot does not match the layout");
  }
  if (static_cast<int>(disturbance_mask.size()) != layout.state_dim) throw std::invalid_argument("bad disturbance mask");
}

std::array<double, 3> formation_command(TaskId id, Tick t, int base_rate_hz) {
  const double s = static_cast<double>(t) / base_rate_hz;
  const double speed = 1.0;
  const double heading = 0.5 * std::sin(2.0 * std::numbers::pi * s / 10.0);
  double code = static_cast<double>(FormationId::Circle);
  if (id == TaskId::FormationSwitching) {
    code = static_cast<double>(s < 10.0 ? FormationId::Triangle : FormationId::Line);
  }
  return {speed, heading, code};
}

namespace {

Task leader_task(TaskId id, const TaskParams& p) {
  Task task;
  task.name = to_string(id);
  const double dt = 1.0 / p.base_rate_hz;
  for (int i = 0; i < 2; ++i) {
    task.truth.push_back(std::make_shared<Car1D>(dt, 1.0));
    task.modeled.push_back(std::make_shared<Car1D>(dt, p.accel_ratio));
  }
  task.disturbance_mask = {false, true};
  task.metric = TaskMetric::Distance;
  Vec x0(4);
  x0 << 1.5, 0.0, 0.0, 0.0;
  task.initial.x = x0;

  if (id == TaskId::LeaderLinear) {
    auto pi = std::make_shared<controllers::LeaderFollowerPid>();
    task.layout = pi->layout();
    task.gap_reference = pi->gains().d_ref;
    task.initial.z = Vec::Constant(2, pi->gains().v_ref);
    task.pi = pi;
    task.true_obs = [](int, std::span<const double> z, std::span<const double>, Tick, std::span<double> out) {
      out[0] = z[0];
    };
  } else {
    auto pi = std::make_shared<controllers::ObstacleBangBang>();
    const auto params = pi->params();
    task.layout = pi->layout();
    task.gap_reference = params.d_ref;
    const double obstacle = x0[0] + 30.0;
    Vec z0(4);
    z0 << params.v_ref, controllers::BangBangParams::kUnseen, params.v_ref, controllers::BangBangParams::kUnseen;
    task.initial.z = z0;
    task.pi = pi;
    task.true_obs = [params, obstacle](int agent, std::span<const double> z, std::span<const double> x, Tick,
                                       std::span<double> out) {
      out[0] = z[0];
      const double pos = x[static_cast<std::size_t>(agent) * 2];
      out[1] = obstacle - pos <= params.sensor_range ? obstacle : controllers::BangBangParams::kUnseen;
    };
  }
  for (int i = 0; i < 2; ++i) task.obs_model.push_back(std::make_shared<HoldObservation>(task.layout.obs_dim));
  return task;
}

Task formation_task(TaskId id, const TaskParams& p) {
  Task task;
  task.name = to_string(id);
  constexpr int kAgents = 4;
  const double dt = 1.0 / p.base_rate_hz;
  auto formation = std::make_shared<FormationController>(kAgents);
  task.layout = formation->layout();
  task.pi = formation;
  task.formation = formation;
  task.metric = TaskMetric::Deviation;
  task.disturbance_mask = {false, false, false, true, true};
  const double L = formation->gains().wheelbase;
  for (int i = 0; i < kAgents; ++i) {
    task.truth.push_back(std::make_shared<Car2D>(dt, L));
    task.modeled.push_back(std::make_shared<Car2D>(dt, L * p.wheelbase_ratio));
    task.obs_model.push_back(std::make_shared<HoldObservation>(3));
  }
  const auto cmd0 = formation_command(id, 0, p.base_rate_hz);
  Vec x0 = Vec::Zero(task.layout.fleet_state_dim());
  Vec z0(task.layout.fleet_obs_dim());
  for (int i = 0; i < kAgents; ++i) {
    z0.segment(3 * i, 3) << cmd0[0], cmd0[1], cmd0[2];
    if (i == 0) continue;
    const auto slot = formation->slot_position(agent_block(as_span(x0), 0, 5), controllers::formation_from_code(cmd0[2]), i);
    x0[5 * i + Car2D::kPx] = slot[0];
    x0[5 * i + Car2D::kPy] = slot[1];
  }
  task.initial.x = x0;
  task.initial.z = z0;
  const int rate = p.base_rate_hz;
  task.true_obs = [id, rate](int, std::span<const double>, std::span<const double>, Tick t, std::span<double> out) {
    const auto cmd = formation_command(id, t + 1, rate);
    out[0] = cmd[0];
    out[1] = cmd[1];
    out[2] = cmd[2];
  };
  return task;
}

}  // namespace

Task make_task(TaskId id, const TaskParams& params) {
  if (!(params.accel_ratio > 0.0) || !(params.wheelbase_ratio > 0.0)) {
    throw std::invalid_argument("model ratios must be positive");
  }
  Task t = (id == TaskId::LeaderLinear || id == TaskId::LeaderBangBang) ? leader_task(id, params)
                                                                         : formation_task(id, params);
  t.validate();
  return t;
}

}  // namespace onevision::sim
