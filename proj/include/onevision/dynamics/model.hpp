#pragma once

#include <memory>
#include <span>

#include "onevision/core/tick.hpp"
#include "onevision/core/trajectory.hpp"
#include "onevision/optim/dual.hpp"

namespace onevision::dynamics {

using optim::Dual;

/// Per-agent discrete-time dynamics x(t+1) = f(x(t), u(t), t). Implementations
/// are deterministic and must be evaluable on dual numbers so the planner can
/// differentiate rollouts.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;
  virtual int state_dim() const = 0;
  virtual int act_dim() const = 0;
  virtual void step(std::span<const double> x, std::span<const double> u, Tick t, std::span<double> out) const = 0;
  virtual void step(std::span<const Dual> x, std::span<const Dual> u, Tick t, std::span<Dual> out) const = 0;
  /// Components that are angles; differences on them are wrapped to (-pi, pi].
  virtual bool is_angle(int /*component*/) const { return false; }

  Vec step(const Vec& x, const Vec& u, Tick t) const;
};

/// Forwards both scalar overloads to `Derived::apply<S>`.
template <class Derived>
class DynamicsBase : public DynamicsModel {
 public:
  void step(std::span<const double> x, std::span<const double> u, Tick t, std::span<double> out) const final {
    static_cast<const Derived&>(*this).template apply<double>(x, u, t, out);
  }
  void step(std::span<const Dual> x, std::span<const Dual> u, Tick t, std::span<Dual> out) const final {
    static_cast<const Derived&>(*this).template apply<Dual>(x, u, t, out);
  }
  using DynamicsModel::step;
};

/// Observation dynamics z(t+1) = h(z(t), t). Observations are
/// state-independent quantities (an obstacle's position, a commanded speed).
class ObservationModel {
 public:
  virtual ~ObservationModel() = default;
  virtual int obs_dim() const = 0;
  virtual void step(std::span<const double> z, Tick t, std::span<double> out) const = 0;

  Vec step(const Vec& z, Tick t) const;
};

/// z(t+1) = z(t): the default model for externally driven observations.
class HoldObservation final : public ObservationModel {
 public:
  explicit HoldObservation(int dim) : dim_(dim) {}
  int obs_dim() const override { return dim_; }
  void step(std::span<const double> z, Tick, std::span<double> out) const override;

 private:
  int dim_;
};

/// Difference a - b with angle components wrapped.
void state_difference(const DynamicsModel& model, std::span<const double> a, std::span<const double> b,
                      std::span<double> out);

/// Wraps the angle components of `x` in place.
void wrap_angles(const DynamicsModel& model, std::span<double> x);

}  // namespace onevision::dynamics
