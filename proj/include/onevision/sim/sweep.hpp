#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "onevision/sim/run.hpp"

namespace onevision::sim {

enum class SweepAxis { Noise, Delay, ModelError, Horizon, Disturbance };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

/// Config for one sweep cell. Noise and disturbance values multiply the base
/// strengths (0 to 10), delay sets the communication delay in ms (10 to 500),
/// model error e sets the true-to-model ratios to 1 + e (0 to 1), horizon
/// sets H in control periods (1 to 30). Out-of-range values throw.
RunConfig apply_axis(const RunConfig& base, SweepAxis axis, double value);

struct SweepRow {
  std::string task;
  std::string framework;
  SweepAxis axis = SweepAxis::Noise;
  double value = 0.0;
  std::string seed;  ///< seed number, or "mean" / "std" on aggregate rows
  Metrics metrics;
  int failed = 0;  ///< 0/1 on data rows, count of failed seeds on aggregates
};

struct SweepOptions {
  std::vector<std::string> frameworks;  ///< empty selects every framework
  int threads = 0;                      ///< 0 uses the hardware concurrency
};

/// Runs every (value, framework, seed) cell with seeds base.seed .. base.seed
/// + seeds - 1. Data rows come in (value, framework, seed) order, followed by
/// mean and std rows per (value, framework) over the successful seeds.
std::vector<SweepRow> run_sweep(const RunConfig& base, SweepAxis axis, const std::vector<double>& values, int seeds,
                                const SweepOptions& options = {});

inline constexpr const char* kSweepHeader =
    "task,framework,axis,value,seed,avg_regret,log_loss,avg_distance,avg_deviation,failed";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace onevision::sim
