#include "learn/packet.hpp"

#include <string>

#include "learn/wire.hpp"

namespace learn {

Port opposite(Port p) noexcept {
  switch (p) {
    case Port::East: return Port::West;
    case Port::West: return Port::East;
    case Port::North: return Port::South;
    case Port::South: return Port::North;
    case Port::Local: return Port::Local;
  }
  return Port::Local;
}

std::string_view to_string(Port p) noexcept {
  switch (p) {
    case Port::Local: return "L";
    case Port::East: return "E";
    case Port::West: return "W";
    case Port::North: return "N";
    case Port::South: return "S";
  }
  return "?";
}

std::string_view to_string(PacketKind k) noexcept {
  switch (k) {
    case PacketKind::RI: return "RI";
    case PacketKind::RA: return "RA";
    case PacketKind::RC: return "RC";
    case PacketKind::DT: return "DT";
    case PacketKind::BaselineData: return "DATA";
  }
  return "?";
}

Bytes Packet::serialize() const {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(kind));
  if (has_vcn()) w.u64(vcn);
  w.bytes(body);
  return w.take();
}

Packet Packet::parse(std::span<const std::uint8_t> in) {
  ByteReader r(in);
  Packet p;
  std::uint8_t k = r.u8();
  if (k < 1 || k > 5) throw ParseError("unknown packet kind " + std::to_string(k));
  p.kind = static_cast<PacketKind>(k);
  if (p.has_vcn()) p.vcn = r.u64();
  auto rest = r.rest();
  p.body.assign(rest.begin(), rest.end());
  return p;
}

std::uint32_t checksum32(std::span<const std::uint8_t> data) noexcept {
  std::uint32_t h = 2166136261u;
  for (std::uint8_t b : data) {
    h ^= b;
    h *= 16777619u;
  }
  return h;
}

}  // namespace learn
