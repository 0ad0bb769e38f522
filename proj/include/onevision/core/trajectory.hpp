#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "onevision/core/tick.hpp"

namespace onevision {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline std::span<const double> as_span(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
inline std::span<double> as_span(Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
inline Vec to_vec(std::span<const double> s) { return Eigen::Map<const Vec>(s.data(), static_cast<Eigen::Index>(s.size())); }

/// Contiguous, fixed-dimension time series: the value at tick t exists iff
/// start <= t < end. Values are stored flat, one row per tick.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(int dim, Tick start = 0);

  int dim() const { return dim_; }
  Tick start() const { return start_; }
  Tick end() const { return start_ + static_cast<Tick>(size()); }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const { return size() == 0; }
  bool contains(Tick t) const { return t >= start_ && t < end(); }

  std::span<const double> at(Tick t) const;
  std::span<double> at(Tick t);
  Vec vec(Tick t) const { return to_vec(at(t)); }

  void push_back(std::span<const double> value);
  void push_back(const Vec& value) { push_back(as_span(value)); }

  /// Writes the value at `t`; `t` must be inside the range or equal to end().
  void write(Tick t, std::span<const double> value);

  /// Copy of [from, to). Out-of-range bounds violate the contract.
  Trajectory slice(Tick from, Tick to) const;

  const std::vector<double>& raw() const { return data_; }
  void reserve(std::size_t ticks) { data_.reserve(ticks * static_cast<std::size_t>(dim_)); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  int dim_ = 0;
  Tick start_ = 0;
  std::vector<double> data_;
};

inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;

/// FNV-1a over the IEEE-754 bytes of every stored value, chained from `h`.
std::uint64_t fnv1a(const Trajectory& trajectory, std::uint64_t h = kFnvOffset);

}  // namespace onevision
