#include "onevision/frameworks/fleet_model.hpp"

#include <stdexcept>

namespace onevision::frameworks {

void FleetModel::step_state(std::span<const double> x, std::span<const double> u, Tick t,
                            std::span<double> out) const {
  const int n = layout.state_dim;
  const int m = layout.act_dim;
  for (int i = 0; i < layout.agents; ++i) {
    f[static_cast<std::size_t>(i)]->step(agent_block(x, i, n), agent_block(u, i, m), t, agent_block(out, i, n));
  }
}

void FleetModel::step_obs(std::span<const double> z, Tick t, std::span<double> out) const {
  const int k = layout.obs_dim;
  for (int i = 0; i < layout.agents; ++i) {
    h[static_cast<std::size_t>(i)]->step(agent_block(z, i, k), t, agent_block(out, i, k));
  }
}

void FleetModel::control(std::span<const double> x, std::span<const double> z, Tick t,
                         std::span<double> held) const {
  if (t % control_interval == 0) pi->act(x, z, t, held);
}

bool FleetModel::is_angle(int fleet_component) const {
  const int n = layout.state_dim;
  return f[static_cast<std::size_t>(fleet_component / n)]->is_angle(fleet_component % n);
}

void FleetModel::wrap(std::span<double> fleet_x) const {
  const int n = layout.state_dim;
  for (int i = 0; i < layout.agents; ++i) dynamics::wrap_angles(*f[static_cast<std::size_t>(i)], agent_block(fleet_x, i, n));
}

void FleetModel::validate() const {
  if (layout.agents < 1) throw std::invalid_argument("fleet needs at least one agent");
  if (static_cast<int>(f.size()) != layout.agents || static_cast<int>(h.size()) != layout.agents) {
    throw std::invalid_argument("one dynamics and one observation model per agent required");
  }
  for (int i = 0; i < layout.agents; ++i) {
    const auto& fi = *f[static_cast<std::size_t>(i)];
    if (fi.state_dim() != layout.state_dim || fi.act_dim() != layout.act_dim ||
        h[static_cast<std::size_t>(i)]->obs_dim() != layout.obs_dim) {
      throw std::invalid_argument("agent model dimensions disagree with the fleet layout");
    }
  }
  if (!pi || !(pi->layout() == layout)) throw std::invalid_argument("central controller layout mismatch");
  if (control_interval < 1) throw std::invalid_argument("control interval must be positive");
}

}  // namespace onevision::frameworks
