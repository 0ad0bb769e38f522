#pragma once

#include <span>
#include <vector>

#include "onevision/optim/dual.hpp"

namespace onevision::optim {

/// Scalar objective over a flat decision vector.
class ObjectiveFunction {
 public:
  virtual ~ObjectiveFunction() = default;
  virtual int dimension() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  /// Writes the gradient into `grad` and returns the value.
  virtual double value_and_gradient(std::span<const double> x, std::span<double> grad) const = 0;
};

/// Gradient of a program written once for `double` and `Dual`, by chunked
/// forward-mode passes. `program(std::span<const S>) -> S` must be callable
/// for both scalar types. Returns the value.
template <class Program>
double forward_gradient(const Program& program, std::span<const double> x, std::span<double> grad) {
  const int n = static_cast<int>(x.size());
  std::vector<Dual> seeded(x.size());
  double value = 0.0;
  if (n == 0) return program(std::span<const double>(x));
  for (int base = 0; base < n; base += kChunk) {
    for (int i = 0; i < n; ++i) {
      seeded[static_cast<std::size_t>(i)] = Dual(x[static_cast<std::size_t>(i)]);
      const int lane = i - base;
      if (lane >= 0 && lane < kChunk) seeded[static_cast<std::size_t>(i)].d[static_cast<std::size_t>(lane)] = 1.0;
    }
    const Dual out = program(std::span<const Dual>(seeded));
    value = out.v;
    for (int lane = 0; lane < kChunk && base + lane < n; ++lane) {
      grad[static_cast<std::size_t>(base + lane)] = out.d[static_cast<std::size_t>(lane)];
    }
  }
  return value;
}

/// Single directional derivative (one forward pass along `direction`).
template <class Program>
double directional_derivative(const Program& program, std::span<const double> x, std::span<const double> direction) {
  std::vector<Dual> seeded(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    seeded[i] = Dual(x[i]);
    seeded[i].d[0] = direction[i];
  }
  return program(std::span<const Dual>(seeded)).d[0];
}

/// Adapts a generic program into an ObjectiveFunction using forward_gradient.
template <class Program>
class AutoDiffObjective final : public ObjectiveFunction {
 public:
  AutoDiffObjective(int dim, Program program) : dim_(dim), program_(std::move(program)) {}
  int dimension() const override { return dim_; }
  double value(std::span<const double> x) const override { return program_(x); }
  double value_and_gradient(std::span<const double> x, std::span<double> grad) const override {
    return forward_gradient(program_, x, grad);
  }

 private:
  int dim_;
  Program program_;
};

template <class Program>
AutoDiffObjective<Program> make_autodiff_objective(int dim, Program program) {
  return AutoDiffObjective<Program>(dim, std::move(program));
}

}  // namespace onevision::optim
