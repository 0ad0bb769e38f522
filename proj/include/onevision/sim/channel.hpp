#pragma once

#include <cstdlib>
#include <deque>
#include <vector>

#include "onevision/core/contract.hpp"
#include "onevision/core/tick.hpp"

namespace onevision::sim {

/// FIFO link with a constant delay: a payload sent at tick s is delivered
/// at exactly s + delay.
template <class Payload>
class DelayedChannel {
 public:
  explicit DelayedChannel(Tick delay) : delay_(delay) { OV_EXPECTS(delay >= 1, "channel delay must be positive"); }

  void send(Tick now, Payload payload) {
    OV_EXPECTS(queue_.empty() || queue_.back().sent <= now, "sends must be in tick order");
    queue_.push_back({now, now + delay_, std::move(payload)});
    ++sent_;
  }

  /// Every payload due at `now`, in send order.
  std::vector<Payload> deliver(Tick now) {
    std::vector<Payload> out;
    while (!queue_.empty() && queue_.front().deliver_at <= now) {
      auto& e = queue_.front();
      const Tick err = std::abs((now - e.sent) - delay_);
      if (err > max_error_) max_error_ = err;
      out.push_back(std::move(e.payload));
      queue_.pop_front();
    }
    return out;
  }

  Tick delay() const { return delay_; }
  std::size_t in_flight() const { return queue_.size(); }
  std::size_t sent() const { return sent_; }
  /// Largest |delivery - send - delay| observed; zero when delivery is exact.
  Tick max_error() const { return max_error_; }

 private:
  struct Entry {
    Tick sent;
    Tick deliver_at;
    Payload payload;
  };
  Tick delay_;
  std::deque<Entry> queue_;
  std::size_t sent_ = 0;
  Tick max_error_ = 0;
};

}  // namespace onevision::sim
