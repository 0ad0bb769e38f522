#pragma once

#include <span>
#include <vector>

#include "onevision/core/trajectory.hpp"

namespace onevision {

/// Per-agent block sizes. Agent i's state occupies [i*state_dim, (i+1)*state_dim)
/// of the concatenated fleet vector, and likewise for observations and actuations.
struct FleetLayout {
  int agents = 0;
  int state_dim = 0;
  int obs_dim = 0;
  int act_dim = 0;

  int fleet_state_dim() const { return agents * state_dim; }
  int fleet_obs_dim() const { return agents * obs_dim; }
  int fleet_act_dim() const { return agents * act_dim; }

  friend bool operator==(const FleetLayout&, const FleetLayout&) = default;
};

struct FleetSnapshot {
  Vec x;
  Vec z;
  Vec u;
};

/// View of one agent's block inside a concatenated fleet vector.
std::span<const double> agent_block(std::span<const double> fleet, int agent, int block_dim);
std::span<double> agent_block(std::span<double> fleet, int agent, int block_dim);

/// Splits a fleet vector into per-agent blocks.
std::vector<Vec> scatter(std::span<const double> fleet, int block_dim);

/// Concatenates per-agent blocks; inverse of scatter.
Vec gather(const std::vector<Vec>& blocks);

/// Per-agent time series of one quantity (x, z or u) for the whole fleet.
struct FleetTrajectory {
  FleetLayout layout;
  Trajectory x;
  Trajectory z;
  Trajectory u;
};

/// FNV-1a over x, z and u in that order.
std::uint64_t checksum(const FleetTrajectory& trajectory);

}  // namespace onevision
