#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "learn/crypto.hpp"
#include "learn/packet.hpp"

namespace learn {

enum class Scheme { None, EncOnly, Onion, Learn, LearnHardened };

std::string_view to_string(Scheme s) noexcept;
/// Accepts the CLI spellings none|enc|onion|learn|learn-hardened.
Scheme parse_scheme(std::string_view s);

constexpr bool is_learn(Scheme s) noexcept { return s == Scheme::Learn || s == Scheme::LearnHardened; }

/// Per-hop keys for one source/destination pair, one per router after the source.
struct OnionCircuit {
  std::uint64_t circuit_id = 0;
  std::vector<std::uint64_t> hop_tokens;
  std::vector<SymKey> hop_keys;

  std::size_t layers() const noexcept { return hop_keys.size(); }
};

/// Keys a baseline sender needs. Missing keys for the active scheme raise ConfigError.
struct BaselineKeys {
  const SymKey* end_to_end = nullptr;
  const OnionCircuit* circuit = nullptr;
};

/// Builds the injected packet. NONE: plaintext. ENC_ONLY: one encryption.
/// ONION: one layer per circuit hop, header names only the next hop.
Packet wrap_for_send(Scheme scheme, CryptoEngine& engine, std::uint64_t src_token, std::uint64_t dst_token,
                     const BaselineKeys& keys, std::span<const std::uint8_t> payload);

struct HopResult {
  bool ok = false;
  std::uint64_t next_hop = 0;
};

/// Intermediate-router processing. ONION peels one layer with `hop_key`; other schemes pass through.
HopResult hop_process(Scheme scheme, CryptoEngine& engine, const SymKey* hop_key, Packet& pkt);

/// nullopt on an integrity failure.
std::optional<Bytes> unwrap_at_dest(Scheme scheme, CryptoEngine& engine, const SymKey* key, const Packet& pkt);

/// Header fields that travel in plaintext with every baseline packet.
struct BaselineHeader {
  std::uint64_t first = 0;
  std::uint64_t second = 0;
};
BaselineHeader read_baseline_header(const Packet& pkt);

}  // namespace learn
