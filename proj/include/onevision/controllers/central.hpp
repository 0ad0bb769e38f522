#pragma once

#include <span>
#include <string>
#include <vector>

#include "onevision/core/fleet.hpp"

namespace onevision::controllers {

/// Centralized fleet policy u = pi_c(x, z, t) over concatenated fleet vectors.
class CentralController {
 public:
  virtual ~CentralController() = default;
  virtual const FleetLayout& layout() const = 0;
  virtual void act(std::span<const double> x, std::span<const double> z, Tick t, std::span<double> u) const = 0;
  /// Per-component actuation bounds for one agent.
  virtual std::vector<double> act_lower() const = 0;
  virtual std::vector<double> act_upper() const = 0;

  Vec act(const Vec& x, const Vec& z, Tick t) const;
};

/// Clamps every agent block of a fleet actuation to the agent bounds.
void clamp_fleet(const CentralController& pi, std::span<double> u);

}  // namespace onevision::controllers
