#pragma once

#include <cstdint>

namespace onevision {

/// Discrete time index at the base rate. Signed so that `now - delay`
/// never wraps; negative ticks address the seeded pre-run history.
using Tick = std::int64_t;

inline constexpr int kDefaultBaseRateHz = 100;

/// Converts a duration in milliseconds to whole ticks. Throws
/// std::invalid_argument when the duration is not an exact multiple of the
/// tick period (33 ms at 100 Hz is rejected rather than rounded).
Tick ticks_from_ms(double ms, int base_rate_hz = kDefaultBaseRateHz);

/// Same as ticks_from_ms but for seconds.
Tick ticks_from_seconds(double seconds, int base_rate_hz = kDefaultBaseRateHz);

/// Observation, actuation and communication delays plus the replanning
/// interval, all in ticks. Every field is at least one tick.
class DelaySpec {
 public:
  DelaySpec(Tick obs_delay, Tick act_delay, Tick comm_delay, Tick control_interval);

  /// Builds a spec from milliseconds and a control rate, e.g. the defaults
  /// 30/40/50 ms at 20 Hz over a 100 Hz base become 3/4/5 ticks, interval 5.
  static DelaySpec from_ms(double obs_ms, double act_ms, double comm_ms, int control_rate_hz,
                           int base_rate_hz = kDefaultBaseRateHz);

  Tick obs() const { return obs_; }
  Tick act() const { return act_; }
  Tick comm() const { return comm_; }
  Tick control_interval() const { return control_interval_; }

  /// Start of the forward-prediction span for a replan at `now`.
  Tick prediction_start(Tick now) const { return now - obs_ - comm_ - 1; }

  bool is_replan_tick(Tick now) const { return now % control_interval_ == 0; }

  friend bool operator==(const DelaySpec&, const DelaySpec&) = default;

 private:
  Tick obs_;
  Tick act_;
  Tick comm_;
  Tick control_interval_;
};

}  // namespace onevision
