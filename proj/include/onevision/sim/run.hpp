#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "onevision/dynamics/disturbance.hpp"
#include "onevision/frameworks/framework.hpp"
#include "onevision/sim/task.hpp"

namespace onevision::sim {

/// One simulation run. Delays are given in milliseconds and quantized to
/// ticks exactly; defaults reproduce the benchmark setting.
struct RunConfig {
  std::string task = "leader-linear";
  std::string framework = "onevision";
  int base_rate_hz = 100;
  int control_rate_hz = 20;
  double obs_ms = 30.0;
  double act_ms = 40.0;
  double comm_ms = 50.0;
  double sensor_noise = 0.005;
  double disturbance_noise = 0.005;
  double accel_ratio = 1.0;
  double wheelbase_ratio = 1.0;
  int horizon = 20;  ///< control periods
  double q_x = 1.0;
  double q_u = 0.1;
  double duration_s = 20.0;
  std::uint64_t seed = 0;
  int lbfgs_memory = 10;
  double lbfgs_g_tol = 1e-8;
  int lbfgs_max_iters = 100;
  double clamp_width = 0.01;

  DelaySpec delays() const;
  Tick ticks() const;
  TaskParams task_params() const;
  frameworks::FrameworkOptions framework_options(const FleetLayout& layout) const;
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Programmatic extras for verification scenarios.
struct ScenarioOverrides {
  std::optional<dynamics::DisturbanceRealization> realization;
  Vec initial_offset;    ///< added to the true initial state only
  Vec agent_init_error;  ///< added to the snapshot handed to the agents
  std::optional<frameworks::RegretWeights> weights;
  std::optional<Tick> control_interval;
  bool record_trace = false;
};

struct Metrics {
  double avg_regret = 0.0;
  double log_loss = 0.0;
  double avg_distance = std::numeric_limits<double>::quiet_NaN();
  double avg_deviation = std::numeric_limits<double>::quiet_NaN();
};

struct RunDiagnostics {
  bool failed = false;
  std::string error;
  std::size_t replans = 0;
  std::size_t flagged_plans = 0;
  std::size_t causality_violations = 0;
  std::size_t messages = 0;
  std::size_t max_message_bytes = 0;
  Tick channel_max_error = 0;
  std::uint64_t checksum_actual = 0;
  std::uint64_t checksum_ideal = 0;
};

/// Full record of a run: actual and ideal trajectories under one shared
/// disturbance realization, the per-tick regret and the summary metrics.
struct RunLog {
  RunConfig config;
  FleetTrajectory actual;
  FleetTrajectory ideal;
  dynamics::DisturbanceRealization realization;
  std::vector<double> regret;
  Metrics metrics;
  RunDiagnostics diagnostics;
  std::vector<frameworks::ReplanRecord> trace;
};

/// Pre-samples process and sensor noise for every agent from config.seed.
dynamics::DisturbanceRealization sample_realization(const Task& task, const RunConfig& config);

/// Closed loop of the true dynamics under pi_c with zero delay and
/// zero-order hold on the replan lattice.
FleetTrajectory ideal_oracle(const Task& task, Tick control_interval, const dynamics::DisturbanceRealization& realization,
                             Tick ticks);

/// Quadratic regret a'Qa summed over agents, angle components wrapped.
double regret_loss(const Task& task, const frameworks::RegretWeights& weights, std::span<const double> x,
                   std::span<const double> x_ideal, std::span<const double> u, std::span<const double> u_ideal);

/// Fills log.regret and log.metrics. Averages start at tick `from`.
void compute_metrics(RunLog& log, const Task& task, const frameworks::RegretWeights& weights, Tick from = 0);

RunLog simulate(const Task& task, const RunConfig& config, const ScenarioOverrides& overrides = {});
RunLog run_simulation(const RunConfig& config);

}  // namespace onevision::sim
