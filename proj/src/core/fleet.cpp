#include "onevision/core/fleet.hpp"

#include "onevision/core/contract.hpp"

namespace onevision {

std::span<const double> agent_block(std::span<const double> fleet, int agent, int block_dim) {
  OV_EXPECTS(agent >= 0 && block_dim >= 0, "negative agent index or block size");
  const auto offset = static_cast<std::size_t>(agent) * static_cast<std::size_t>(block_dim);
  OV_EXPECTS(offset + static_cast<std::size_t>(block_dim) <= fleet.size(), "agent block outside fleet vector");
  return fleet.subspan(offset, static_cast<std::size_t>(block_dim));
}

std::span<double> agent_block(std::span<double> fleet, int agent, int block_dim) {
  OV_EXPECTS(agent >= 0 && block_dim >= 0, "negative agent index or block size");
  const auto offset = static_cast<std::size_t>(agent) * static_cast<std::size_t>(block_dim);
  OV_EXPECTS(offset + static_cast<std::size_t>(block_dim) <= fleet.size(), "agent block outside fleet vector");
  return fleet.subspan(offset, static_cast<std::size_t>(block_dim));
}

std::vector<Vec> scatter(std::span<const double> fleet, int block_dim) {
  if (block_dim <= 0 || fleet.size() % static_cast<std::size_t>(block_dim) != 0) {
    throw std::invalid_argument("fleet vector of size " + std::to_string(fleet.size()) +
                                " is not a whole number of blocks of size " + std::to_string(block_dim));
  }
  std::vector<Vec> blocks;
  const int n = static_cast<int>(fleet.size()) / block_dim;
  blocks.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) blocks.push_back(to_vec(agent_block(fleet, i, block_dim)));
  return blocks;
}

Vec gather(const std::vector<Vec>& blocks) {
  Eigen::Index total = 0;
  for (const auto& b : blocks) {
    if (b.size() != blocks.front().size()) throw std::invalid_argument("agent blocks differ in dimension");
    total += b.size();
  }
  Vec out(total);
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    out.segment(offset, b.size()) = b;
    offset += b.size();
  }
  return out;
}

std::uint64_t checksum(const FleetTrajectory& trajectory) {
  return fnv1a(trajectory.u, fnv1a(trajectory.z, fnv1a(trajectory.x)));
}

}  // namespace onevision
