#ifndef HAMCON_MESSAGE_HPP
#define HAMCON_MESSAGE_HPP

#include <array>
#include <cstdint>

#include "hamcon/graph.hpp"

namespace hamcon {

inline int ceil_log2(std::size_t n) {
  int bits = 1;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

/// Largest message the model admits: 6 identifier slots plus a kind
/// byte and a flag byte.
inline int bit_budget(std::size_t n) { return 6 * ceil_log2(n) + 16; }

/// One protocol message: a kind tag, 8 flag bits, and up to a handful
/// of vertex/path identifiers (each costing ceil(log2 n) bits on the
/// wire). Capacity is above the budget on purpose so oversized sends
/// can be constructed and rejected by the engine.
struct Message {
  std::uint8_t kind = 0;
  std::uint8_t flags = 0;
  std::uint8_t id_count = 0;
  std::array<VertexId, 8> ids{};

  Message() = default;
  explicit Message(std::uint8_t k, std::uint8_t f = 0) : kind(k), flags(f) {}

  Message& push(VertexId id) {
    ids[id_count++] = id;
    return *this;
  }
  VertexId id(int i) const { return ids[static_cast<std::size_t>(i)]; }
  bool flag(int bit) const { return (flags >> bit) & 1; }
  void set_flag(int bit, bool value = true) {
    if (value) {
      flags = static_cast<std::uint8_t>(flags | (1u << bit));
    } else {
      flags = static_cast<std::uint8_t>(flags & ~(1u << bit));
    }
  }
};

inline int message_bits(const Message& m, std::size_t n) {
  return 16 + static_cast<int>(m.id_count) * ceil_log2(n);
}

struct Envelope {
  VertexId sender;
  Message msg;
};

}  // namespace hamcon

#endif  // HAMCON_MESSAGE_HPP
