#include "onevision/core/trajectory.hpp"

#include <algorithm>
#include <cstring>

#include "onevision/core/contract.hpp"

namespace onevision {

Trajectory::Trajectory(int dim, Tick start) : dim_(dim), start_(start) {
  OV_EXPECTS(dim >= 0, "negative trajectory dimension");
}

std::span<const double> Trajectory::at(Tick t) const {
  OV_EXPECTS(contains(t), "tick " + std::to_string(t) + " outside [" + std::to_string(start_) + ", " +
                              std::to_string(end()) + ")");
  const auto offset = static_cast<std::size_t>(t - start_) * static_cast<std::size_t>(dim_);
  return {data_.data() + offset, static_cast<std::size_t>(dim_)};
}

std::span<double> Trajectory::at(Tick t) {
  OV_EXPECTS(contains(t), "tick " + std::to_string(t) + " outside [" + std::to_string(start_) + ", " +
                              std::to_string(end()) + ")");
  const auto offset = static_cast<std::size_t>(t - start_) * static_cast<std::size_t>(dim_);
  return {data_.data() + offset, static_cast<std::size_t>(dim_)};
}

void Trajectory::push_back(std::span<const double> value) {
  OV_EXPECTS(static_cast<int>(value.size()) == dim_, "dimension mismatch on push_back");
  data_.insert(data_.end(), value.begin(), value.end());
}

void Trajectory::write(Tick t, std::span<const double> value) {
  if (t == end()) {
    push_back(value);
    return;
  }
  OV_EXPECTS(static_cast<int>(value.size()) == dim_, "dimension mismatch on write");
  auto dst = at(t);
  std::copy(value.begin(), value.end(), dst.begin());
}

Trajectory Trajectory::slice(Tick from, Tick to) const {
  OV_EXPECTS(from <= to && from >= start_ && to <= end(), "slice [" + std::to_string(from) + ", " +
                                                               std::to_string(to) + ") out of range");
  Trajectory out(dim_, from);
  const auto first = static_cast<std::size_t>(from - start_) * static_cast<std::size_t>(dim_);
  const auto last = static_cast<std::size_t>(to - start_) * static_cast<std::size_t>(dim_);
  out.data_.assign(data_.begin() + static_cast<std::ptrdiff_t>(first),
                   data_.begin() + static_cast<std::ptrdiff_t>(last));
  return out;
}

std::uint64_t fnv1a(const Trajectory& trajectory, std::uint64_t h) {
  for (double v : trajectory.raw()) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace onevision
