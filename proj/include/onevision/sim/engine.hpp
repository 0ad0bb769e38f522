#pragma once

#include <memory>
#include <vector>

#include "onevision/sim/run.hpp"

namespace onevision::sim {

/// Tick-by-tick closed loop of the true fleet under a distributed framework:
/// sensing with T^x, the inter-agent channel with T^c and the actuation
/// schedule committed T^u ahead. `task` and `realization` are referenced,
/// not copied; the realization may grow between steps.
class Engine {
 public:
  Engine(const Task& task, const RunConfig& config, const ScenarioOverrides& overrides,
         const dynamics::DisturbanceRealization& realization);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Applies u(now) and advances to now + 1. The realization must cover now.
  void step();
  Tick now() const;
  const FleetTrajectory& actual() const;
  const DelaySpec& delays() const;
  const frameworks::FrameworkOptions& options() const;

  /// Channel, causality and replan counters accumulated so far.
  RunDiagnostics diagnostics() const;
  std::vector<frameworks::ReplanRecord> trace() const;

 private:
  struct State;
  std::unique_ptr<State> s_;
};

}  // namespace onevision::sim
