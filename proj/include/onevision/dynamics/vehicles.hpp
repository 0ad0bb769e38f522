#pragma once

#include "onevision/dynamics/model.hpp"

namespace onevision::dynamics {

/// 1D double integrator, state (p, v), actuation a. `accel_gain` scales the
/// applied acceleration; a modeled gain r1 != 1 against a true gain of 1 is
/// the acceleration model error knob.
class Car1D final : public DynamicsBase<Car1D> {
 public:
  static constexpr int kPos = 0;
  static constexpr int kVel = 1;

  explicit Car1D(double dt = 0.01, double accel_gain = 1.0) : dt_(dt), accel_gain_(accel_gain) {}
  int state_dim() const override { return 2; }
  int act_dim() const override { return 1; }

  template <class S>
  void apply(std::span<const S> x, std::span<const S> u, Tick, std::span<S> out) const {
    out[kPos] = x[kPos] + dt_ * x[kVel];
    out[kVel] = x[kVel] + (dt_ * accel_gain_) * u[0];
  }

  double dt() const { return dt_; }
  double accel_gain() const { return accel_gain_; }

 private:
  double dt_;
  double accel_gain_;
};

/// Kinematic bicycle, state (px, py, theta, v, psi), actuation (a, psi_dot),
/// forward Euler. The steering angle is clamped to +-psi_max after each step
/// and the heading is kept in (-pi, pi].
class Car2D final : public DynamicsBase<Car2D> {
 public:
  static constexpr int kPx = 0;
  static constexpr int kPy = 1;
  static constexpr int kHeading = 2;
  static constexpr int kSpeed = 3;
  static constexpr int kSteer = 4;
  static constexpr int kAccel = 0;
  static constexpr int kSteerRate = 1;

  static constexpr double kDefaultWheelbase = 0.3;
  static constexpr double kDefaultMaxSteer = 0.6;
  static constexpr double kMaxAccel = 3.0;
  static constexpr double kMaxSteerRate = 3.0;

  explicit Car2D(double dt = 0.01, double wheelbase = kDefaultWheelbase, double max_steer = kDefaultMaxSteer,
                 double clamp_width = 0.01)
      : dt_(dt), wheelbase_(wheelbase), max_steer_(max_steer), clamp_width_(clamp_width) {}

  int state_dim() const override { return 5; }
  int act_dim() const override { return 2; }
  bool is_angle(int component) const override { return component == kHeading; }

  template <class S>
  void apply(std::span<const S> x, std::span<const S> u, Tick, std::span<S> out) const {
    using std::cos;
    using std::sin;
    using std::tan;
    const S v = x[kSpeed];
    out[kPx] = x[kPx] + dt_ * v * cos(x[kHeading]);
    out[kPy] = x[kPy] + dt_ * v * sin(x[kHeading]);
    out[kHeading] = optim::wrap_angle(S(x[kHeading] + dt_ * v * tan(x[kSteer]) / wheelbase_));
    out[kSpeed] = v + dt_ * u[kAccel];
    out[kSteer] = optim::saturate(S(x[kSteer] + dt_ * u[kSteerRate]), -max_steer_, max_steer_, clamp_width_);
  }

  double dt() const { return dt_; }
  double wheelbase() const { return wheelbase_; }
  double max_steer() const { return max_steer_; }

 private:
  double dt_;
  double wheelbase_;
  double max_steer_;
  double clamp_width_;
};

/// Named view of a Car2D state block.
struct CarState2D {
  double px = 0;
  double py = 0;
  double heading = 0;
  double speed = 0;
  double steer = 0;

  static CarState2D from(std::span<const double> x) { return {x[0], x[1], x[2], x[3], x[4]}; }
  Vec to_vec() const {
    Vec v(5);
    v << px, py, heading, speed, steer;
    return v;
  }
};

struct CarState1D {
  double pos = 0;
  double vel = 0;
};

}  // namespace onevision::dynamics
