#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "onevision/dynamics/model.hpp"

namespace onevision::dynamics {

/// Pre-sampled disturbance and sensor-noise sequences for one run. The same
/// realization drives both the actual and the ideal closed loop.
struct DisturbanceRealization {
  std::vector<Trajectory> dx;      ///< per agent, state disturbance delta_x(t)
  std::vector<Trajectory> dz;      ///< per agent, observation disturbance delta_z(t)
  std::vector<Trajectory> sensor;  ///< per agent, additive measurement noise on x
  std::uint64_t seed = 0;

  /// Zero sequences of the given shape over [0, ticks).
  static DisturbanceRealization zeros(int agents, int state_dim, int obs_dim, Tick ticks);

  /// FNV-1a over the raw bytes of dx, dz and sensor.
  std::uint64_t checksum() const;
};

/// i.i.d. zero-mean Gaussian samples over [0, ticks). `strength` is the
/// per-tick standard deviation at 100 Hz; other base rates scale it by
/// sqrt(100 / rate_hz). Components with mask[k] == false stay zero.
Trajectory sample_noise(double strength, int rate_hz, Tick ticks, const std::vector<bool>& mask,
                        std::mt19937_64& rng);

/// True step: model.step(x, u, t) + dx(t). `t` must lie inside the realization.
Vec step_true(const DynamicsModel& model, const Trajectory& dx, const Vec& x, const Vec& u, Tick t);

/// delta_x(t) = x(t+1) - f_hat(x(t), u(t), t), angle components wrapped.
Vec measure_disturbance(const DynamicsModel& model, const Vec& x_next, const Vec& x, const Vec& u, Tick t);

/// delta_z(t) = z(t+1) - h_hat(z(t), t).
Vec measure_observation_disturbance(const ObservationModel& model, const Vec& z_next, const Vec& z, Tick t);

}  // namespace onevision::dynamics
