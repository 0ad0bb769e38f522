#include "onevision/core/tick.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace onevision {

namespace {

Tick exact_ticks(double value, double ticks_per_unit, const char* unit) {
  if (!std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument(std::string("duration must be finite and non-negative, got ") +
                                std::to_string(value) + " " + unit);
  }
  const double ticks = value * ticks_per_unit;
  const double rounded = std::round(ticks);
  if (std::abs(ticks - rounded) > 1e-9 * std::max(1.0, ticks)) {
    throw std::invalid_argument(std::to_string(value) + " " + unit + " is " + std::to_string(ticks) +
                                " ticks; delays and durations must be whole ticks");
  }
  return static_cast<Tick>(rounded);
}

}  // namespace

Tick ticks_from_ms(double ms, int base_rate_hz) {
  return exact_ticks(ms, static_cast<double>(base_rate_hz) / 1000.0, "ms");
}

Tick ticks_from_seconds(double seconds, int base_rate_hz) {
  return exact_ticks(seconds, static_cast<double>(base_rate_hz), "s");
}

DelaySpec::DelaySpec(Tick obs_delay, Tick act_delay, Tick comm_delay, Tick control_interval)
    : obs_(obs_delay), act_(act_delay), comm_(comm_delay), control_interval_(control_interval) {
  if (obs_ < 1 || act_ < 1 || comm_ < 1) {
    throw std::invalid_argument("observation, actuation and communication delays must be >= 1 tick (got " +
                                std::to_string(obs_) + "/" + std::to_string(act_) + "/" +
                                std::to_string(comm_) + ")");
  }
  if (control_interval_ < 1) {
    throw std::invalid_argument("control interval must be >= 1 tick");
  }
}

DelaySpec DelaySpec::from_ms(double obs_ms, double act_ms, double comm_ms, int control_rate_hz,
                             int base_rate_hz) {
  if (control_rate_hz <= 0 || base_rate_hz % control_rate_hz != 0) {
    throw std::invalid_argument("control rate " + std::to_string(control_rate_hz) +
                                " Hz must divide the base rate " + std::to_string(base_rate_hz) + " Hz");
  }
  return DelaySpec(ticks_from_ms(obs_ms, base_rate_hz), ticks_from_ms(act_ms, base_rate_hz),
                   ticks_from_ms(comm_ms, base_rate_hz), base_rate_hz / control_rate_hz);
}

}  // namespace onevision
