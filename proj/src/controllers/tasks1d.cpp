#include "onevision/controllers/tasks1d.hpp"

#include <algorithm>

namespace onevision::controllers {

LeaderFollowerPid::LeaderFollowerPid(PidGains gains) : layout_{2, 2, 1, 1}, gains_(gains) {}

void LeaderFollowerPid::act(std::span<const double> x, std::span<const double> z, Tick, std::span<double> u) const {
  const double p1 = x[0], v1 = x[1], p2 = x[2], v2 = x[3];
  const double v_ref = z[0];
  u[0] = std::clamp(gains_.kp * (v_ref - v1), -gains_.a_max, gains_.a_max);
  u[1] = std::clamp(gains_.kp * (v1 - v2) + gains_.kd * (p1 - p2 - gains_.d_ref), -gains_.a_max, gains_.a_max);
}

ObstacleBangBang::ObstacleBangBang(BangBangParams params) : layout_{2, 2, 2, 1}, params_(params) {}

namespace {

double bang(double s, double deadband, double a_max) {
  if (s > deadband) return a_max;
  if (s < -deadband) return -a_max;
  return 0.0;
}

}  // namespace

void ObstacleBangBang::act(std::span<const double> x, std::span<const double> z, Tick, std::span<double> u) const {
  const double p1 = x[0], v1 = x[1], p2 = x[2], v2 = x[3];
  const double v_ref = z[0];
  const double obstacle = z[1];
  const double gap = obstacle - p1;
  const bool brake = obstacle < BangBangParams::kUnseen && gap <= params_.brake_distance(v_ref);
  const double target = brake ? 0.0 : v_ref;
  u[0] = bang(target - v1, params_.deadband, params_.a_max);
  const double surface = (p1 - p2 - params_.d_ref) + params_.speed_gain * (v1 - v2);
  u[1] = bang(surface, params_.deadband, params_.a_max);
}

}  // namespace onevision::controllers
