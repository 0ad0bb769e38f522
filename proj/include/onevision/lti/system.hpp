#pragma once

#include <functional>
#include <random>
#include <vector>

#include "onevision/core/fleet.hpp"
#include "onevision/sim/task.hpp"

namespace onevision::lti {

/// Fleet of linear agents x_i(t+1) = A_i x_i + B_i u_i + w_i(t),
/// z_i(t+1) = C_i z_i + mu_i(t), under pi_c = -Kx x + Kz z + v(t).
struct LtiTestSystem {
  using Signal = std::function<Vec(Tick)>;

  int agents = 0;
  std::vector<Mat> A, B, C;
  Mat Kx, Kz;
  Signal v;                       ///< fleet feedforward, optional
  std::vector<Signal> w, mu;      ///< per-agent modeled drifts, optional
  Vec x0, z0;

  FleetLayout layout() const;
  Mat fleet_A() const;
  Mat fleet_B() const;

  /// Fleet map over one control period when the actuation is held for
  /// `interval` ticks: A^k - sum_{j<k} A^j B Kx.
  Mat held_closed_loop(int interval) const;

  /// Throws std::invalid_argument unless rho(A_i) <= 1, rho(C_i) <= 1 and the
  /// closed loop under a hold of `interval` ticks is Schur stable, each to 1e-9.
  void validate(int interval = 1) const;

  /// Simulation task with exact models, process disturbance on every state
  /// component and the drifts shared by truth and model.
  sim::Task to_task() const;
};

/// Two agents, each a planar double integrator (px, py, vx, vy) with step dt
/// and C = I on a 2D reference observation. Kx is the centralized LQR gain
/// for a cost that couples the agents through their relative position; Kz
/// makes z the equilibrium position of each agent.
LtiTestSystem canonical_system(double dt = 0.01);

/// Random fleet of 1-3 agents with shared block sizes, marginally stable
/// A_i and C_i, dense Kx from a coupled LQR cost that also stabilizes the
/// loop under a hold of `interval` ticks, random Kz and random sinusoidal
/// feedforward and drifts.
LtiTestSystem random_system(std::mt19937_64& rng, int interval = 1);

}  // namespace onevision::lti
