#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "learn/common.hpp"

namespace learn {

/// Router port. Local is the NI; East is +x, North is +y.
enum class Port : std::uint8_t { Local = 0, East = 1, West = 2, North = 3, South = 4 };
inline constexpr int kPortCount = 5;

constexpr int port_index(Port p) noexcept { return static_cast<int>(p); }
Port opposite(Port p) noexcept;
std::string_view to_string(Port p) noexcept;

enum class PacketKind : std::uint8_t { RI = 1, RA = 2, RC = 3, DT = 4, BaselineData = 5 };

std::string_view to_string(PacketKind k) noexcept;

/// A protocol packet in canonical form: kind || [vcn] || body.
/// The vcn field is present on the wire for RC and DT only.
struct Packet {
  PacketKind kind = PacketKind::BaselineData;
  std::uint64_t vcn = 0;
  Bytes body;

  bool has_vcn() const noexcept { return kind == PacketKind::RC || kind == PacketKind::DT; }
  Bytes serialize() const;
  std::uint64_t wire_bits() const noexcept { return 8 * (1 + (has_vcn() ? 8 : 0) + body.size()); }
  static Packet parse(std::span<const std::uint8_t> in);
};

/// 32-bit FNV-1a, used as the end-to-end DT integrity check.
std::uint32_t checksum32(std::span<const std::uint8_t> data) noexcept;

}  // namespace learn
