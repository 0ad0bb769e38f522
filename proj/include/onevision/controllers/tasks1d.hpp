#pragma once

#include "onevision/controllers/central.hpp"

namespace onevision::controllers {

struct PidGains {
  double kp = 2.0;
  double kd = 1.0;
  double v_ref = 2.0;
  double d_ref = 1.5;
  double a_max = 3.0;
};

/// Two 1D cars. Observation per agent: (target speed). The leader tracks the
/// target speed, the follower tracks the leader's speed and a fixed gap.
class LeaderFollowerPid final : public CentralController {
 public:
  explicit LeaderFollowerPid(PidGains gains = {});
  const FleetLayout& layout() const override { return layout_; }
  void act(std::span<const double> x, std::span<const double> z, Tick t, std::span<double> u) const override;
  std::vector<double> act_lower() const override { return {-gains_.a_max}; }
  std::vector<double> act_upper() const override { return {gains_.a_max}; }
  const PidGains& gains() const { return gains_; }
  using CentralController::act;

 private:
  FleetLayout layout_;
  PidGains gains_;
};

struct BangBangParams {
  double v_ref = 2.0;
  double d_ref = 1.5;
  double a_max = 3.0;
  double deadband = 0.05;
  double stop_margin = 2.0;
  double sensor_range = 20.0;
  double speed_gain = 1.0;  ///< weight of the speed error in the follower switching surface
  static constexpr double kUnseen = 1000.0;

  /// Braking distance from speed v plus the stop margin.
  double brake_distance(double v) const { return v * v / (2.0 * a_max) + stop_margin; }
};

/// Two 1D cars. Observation per agent: (target speed, obstacle position or
/// kUnseen). The leader accelerates at full throttle until the obstacle is
/// within braking distance; the follower switches on its gap error.
class ObstacleBangBang final : public CentralController {
 public:
  explicit ObstacleBangBang(BangBangParams params = {});
  const FleetLayout& layout() const override { return layout_; }
  void act(std::span<const double> x, std::span<const double> z, Tick t, std::span<double> u) const override;
  std::vector<double> act_lower() const override { return {-params_.a_max}; }
  std::vector<double> act_upper() const override { return {params_.a_max}; }
  const BangBangParams& params() const { return params_; }
  using CentralController::act;

 private:
  FleetLayout layout_;
  BangBangParams params_;
};

}  // namespace onevision::controllers
