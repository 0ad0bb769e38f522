#include "onevision/frameworks/message.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

namespace onevision::frameworks {

namespace {

static_assert(std::endian::native == std::endian::little, "wire encoding assumes a little-endian host");

template <class T>
void put(std::vector<std::uint8_t>& out, T value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw std::invalid_argument("message truncated");
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode(const Message& message) {
  std::vector<std::uint8_t> out;
  put<std::int32_t>(out, message.sender);
  put<std::int64_t>(out, message.sent);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(message.segments.size()));
  for (const auto& s : message.segments) {
    put<std::uint8_t>(out, static_cast<std::uint8_t>(s.kind));
    put<std::uint32_t>(out, s.agent);
    put<std::int64_t>(out, s.start);
    put<std::uint32_t>(out, s.count());
    put<std::uint32_t>(out, s.dim);
    for (double v : s.values) put<double>(out, v);
  }
  return out;
}

Message decode(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  Message m;
  m.sender = r.get<std::int32_t>();
  m.sent = r.get<std::int64_t>();
  const auto n = r.get<std::uint32_t>();
  for (std::uint32_t k = 0; k < n; ++k) {
    Segment s;
    const auto kind = r.get<std::uint8_t>();
    if (kind < 1 || kind > 5) throw std::invalid_argument("unknown segment kind");
    s.kind = static_cast<SegmentKind>(kind);
    s.agent = r.get<std::uint32_t>();
    s.start = r.get<std::int64_t>();
    const auto count = r.get<std::uint32_t>();
    s.dim = r.get<std::uint32_t>();
    const std::size_t total = static_cast<std::size_t>(count) * s.dim;
    if (total > bytes.size()) throw std::invalid_argument("segment larger than message");
    s.values.resize(total);
    for (auto& v : s.values) v = r.get<double>();
    m.segments.push_back(std::move(s));
  }
  if (!r.done()) throw std::invalid_argument("trailing bytes after message");
  return m;
}

}  // namespace onevision::frameworks
