#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "onevision/controllers/formation.hpp"
#include "onevision/dynamics/model.hpp"
#include "onevision/frameworks/fleet_model.hpp"

namespace onevision::sim {

enum class TaskId { LeaderLinear, LeaderBangBang, FormationCircle, FormationSwitching };

const char* to_string(TaskId id);
/// Accepts the registered names or the task number 1-4.
TaskId task_from_string(std::string_view name);
std::vector<TaskId> all_tasks();

enum class TaskMetric { None, Distance, Deviation };

/// True observation step z(t+1) for one agent before the observation disturbance.
using TrueObservation =
    std::function<void(int agent, std::span<const double> z, std::span<const double> fleet_x, Tick t, std::span<double> out)>;

/// Everything the world needs to simulate a scenario: true and modeled
/// dynamics, the centralized specification and the initial condition.
struct Task {
  std::string name;
  FleetLayout layout;
  std::vector<std::shared_ptr<const dynamics::DynamicsModel>> truth;
  std::vector<std::shared_ptr<const dynamics::DynamicsModel>> modeled;
  std::vector<std::shared_ptr<const dynamics::ObservationModel>> obs_model;
  TrueObservation true_obs;
  std::shared_ptr<const controllers::CentralController> pi;
  FleetSnapshot initial;
  std::vector<bool> disturbance_mask;  ///< per-agent state components receiving process noise
  TaskMetric metric = TaskMetric::None;
  double gap_reference = 0.0;          ///< desired leader-follower gap for TaskMetric::Distance
  std::shared_ptr<const controllers::FormationController> formation;

  frameworks::FleetModel fleet_model(Tick control_interval) const;
  void validate() const;
};

struct TaskParams {
  double accel_ratio = 1.0;      ///< modeled / true acceleration (1D tasks)
  double wheelbase_ratio = 1.0;  ///< modeled / true wheelbase (2D tasks)
  int base_rate_hz = 100;
};

Task make_task(TaskId id, const TaskParams& params = {});

/// Leader command script for the formation tasks at time `t`: speed,
/// heading and formation code.
std::array<double, 3> formation_command(TaskId id, Tick t, int base_rate_hz);

}  // namespace onevision::sim
