#pragma once

#include <cstdint>
#include <vector>

#include "onevision/core/trajectory.hpp"

namespace onevision::frameworks {

enum class SegmentKind : std::uint8_t { State = 1, Observation = 2, Actuation = 3, StateDelta = 4, ObservationDelta = 5 };

/// Contiguous run of one agent's values of one kind.
struct Segment {
  SegmentKind kind = SegmentKind::State;
  std::uint32_t agent = 0;
  Tick start = 0;
  std::uint32_t dim = 0;
  std::vector<double> values;  ///< count * dim, tick-major

  std::uint32_t count() const { return dim == 0 ? 0 : static_cast<std::uint32_t>(values.size() / dim); }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Message {
  int sender = 0;
  Tick sent = 0;
  std::vector<Segment> segments;
  friend bool operator==(const Message&, const Message&) = default;
};

/// Wire layout, all little-endian:
///   i32 sender, i64 sent, u32 segment count, then per segment
///   u8 kind, u32 agent, i64 start, u32 count, u32 dim, count*dim f64.
std::vector<std::uint8_t> encode(const Message& message);
/// Throws std::invalid_argument on truncated or malformed input.
Message decode(const std::vector<std::uint8_t>& bytes);

}  // namespace onevision::frameworks
