#pragma once

#include <vector>

#include "onevision/core/availability.hpp"
#include "onevision/core/contract.hpp"
#include "onevision/core/fleet.hpp"
#include "onevision/frameworks/fleet_model.hpp"
#include "onevision/frameworks/message.hpp"

namespace onevision::frameworks {

/// Raised when a controller reads data that the availability rule says it
/// cannot have yet.
class CausalityViolation : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

/// One agent's view of the fleet history. Reads are checked against
/// available_history at the current tick; ticks before zero resolve to the
/// constant initial history.
class FleetKnowledge {
 public:
  FleetKnowledge(int self, FleetLayout layout, DelaySpec delays, FleetSnapshot initial);

  int self() const { return self_; }
  const FleetLayout& layout() const { return layout_; }
  const DelaySpec& delays() const { return delays_; }
  const FleetSnapshot& initial() const { return initial_; }

  void set_now(Tick now);
  Tick now() const { return now_; }
  HistoryCutoffs cutoffs() const { return cutoffs_; }

  /// Stores the own measured sample at `t` and, when x(t-1) is known, the
  /// measured disturbances at t-1.
  void record_own_sample(Tick t, std::span<const double> x, std::span<const double> z, const FleetModel& model);
  void record_own_actuation(Tick start, const Trajectory& u);
  void ingest(const Message& message);

  std::span<const double> x(int agent, Tick t) const;
  std::span<const double> z(int agent, Tick t) const;
  std::span<const double> u(int agent, Tick t) const;
  std::span<const double> dx(int agent, Tick t) const;
  std::span<const double> dz(int agent, Tick t) const;

  /// Unchecked own histories, used to build outgoing messages.
  const Trajectory& own_x() const { return x_[static_cast<std::size_t>(self_)]; }
  const Trajectory& own_z() const { return z_[static_cast<std::size_t>(self_)]; }
  const Trajectory& own_u() const { return u_[static_cast<std::size_t>(self_)]; }
  const Trajectory& own_dx() const { return dx_[static_cast<std::size_t>(self_)]; }
  const Trajectory& own_dz() const { return dz_[static_cast<std::size_t>(self_)]; }

  std::size_t violations() const { return violations_; }

 private:
  enum class Kind { X, Z, U, DX, DZ };
  std::span<const double> read(Kind kind, int agent, Tick t) const;
  Tick cutoff(Kind kind, int agent) const;

  int self_;
  FleetLayout layout_;
  DelaySpec delays_;
  FleetSnapshot initial_;
  Tick now_ = 0;
  HistoryCutoffs cutoffs_{};
  std::vector<Trajectory> x_, z_, u_, dx_, dz_;
  std::vector<double> zero_x_, zero_z_;
  mutable std::size_t violations_ = 0;
};

}  // namespace onevision::frameworks
