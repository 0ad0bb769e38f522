#pragma once

#include <memory>
#include <vector>

#include "onevision/controllers/central.hpp"
#include "onevision/dynamics/model.hpp"

namespace onevision::frameworks {

/// What every agent knows about the fleet: modeled dynamics f_hat, modeled
/// observation dynamics h_hat, the centralized policy and the replan lattice.
struct FleetModel {
  FleetLayout layout;
  std::vector<std::shared_ptr<const dynamics::DynamicsModel>> f;
  std::vector<std::shared_ptr<const dynamics::ObservationModel>> h;
  std::shared_ptr<const controllers::CentralController> pi;
  Tick control_interval = 1;

  const dynamics::DynamicsModel& agent_model(int agent) const { return *f[static_cast<std::size_t>(agent)]; }

  /// Fleet step with f_hat on every block.
  void step_state(std::span<const double> x, std::span<const double> u, Tick t, std::span<double> out) const;
  void step_obs(std::span<const double> z, Tick t, std::span<double> out) const;
  /// Zero-order-hold evaluation of pi_c: recomputed on lattice ticks,
  /// otherwise `held` is returned unchanged.
  void control(std::span<const double> x, std::span<const double> z, Tick t, std::span<double> held) const;
  bool is_angle(int fleet_component) const;
  void wrap(std::span<double> fleet_x) const;

  void validate() const;
};

}  // namespace onevision::frameworks
