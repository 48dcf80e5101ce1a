#include "learn/baseline.hpp"

#include <string>

#include "learn/wire.hpp"

namespace learn {

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::None: return "none";
    case Scheme::EncOnly: return "enc";
    case Scheme::Onion: return "onion";
    case Scheme::Learn: return "learn";
    case Scheme::LearnHardened: return "learn-hardened";
  }
  return "?";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "none") return Scheme::None;
  if (s == "enc") return Scheme::EncOnly;
  if (s == "onion") return Scheme::Onion;
  if (s == "learn") return Scheme::Learn;
  if (s == "learn-hardened") return Scheme::LearnHardened;
  throw ConfigError("scheme: unknown value '" + std::string(s) + "'");
}

Packet wrap_for_send(Scheme scheme, CryptoEngine& engine, std::uint64_t src_token, std::uint64_t dst_token,
                     const BaselineKeys& keys, std::span<const std::uint8_t> payload) {
  ByteWriter w;
  switch (scheme) {
    case Scheme::None:
      w.u64(src_token).u64(dst_token).bytes(payload);
      break;
    case Scheme::EncOnly: {
      if (!keys.end_to_end) throw ConfigError("scheme enc: no end-to-end key provisioned");
      w.u64(src_token).u64(dst_token);
      engine.sym_encrypt(payload, *keys.end_to_end).write(w);
      break;
    }
    case Scheme::Onion: {
      const OnionCircuit* c = keys.circuit;
      if (!c || c->layers() == 0) throw ConfigError("scheme onion: no circuit provisioned");
      SealedBlob blob = engine.sym_encrypt(payload, c->hop_keys.back());
      for (std::size_t i = c->layers() - 1; i-- > 0;) {
        ByteWriter layer;
        layer.u64(c->hop_tokens[i + 1]);
        blob.write(layer);
        blob = engine.sym_encrypt(layer.take(), c->hop_keys[i], blob.layers);
      }
      w.u64(c->hop_tokens.front()).u64(c->circuit_id);
      blob.write(w);
      break;
    }
    case Scheme::Learn:
    case Scheme::LearnHardened:
      throw ConfigError("LEARN packets are built by the protocol layer");
  }
  return Packet{PacketKind::BaselineData, 0, w.take()};
}

HopResult hop_process(Scheme scheme, CryptoEngine& engine, const SymKey* hop_key, Packet& pkt) {
  if (scheme != Scheme::Onion) return {true, read_baseline_header(pkt).second};
  if (!hop_key) return {false, 0};
  ByteReader r(pkt.body);
  r.u64();
  std::uint64_t circuit = r.u64();
  SealedBlob blob = SealedBlob::parse(r.rest());
  auto plain = engine.sym_decrypt(blob, *hop_key);
  if (!plain) return {false, 0};
  ByteReader inner(*plain);
  std::uint64_t next = inner.u64();
  ByteWriter w;
  w.u64(next).u64(circuit).bytes(inner.rest());
  pkt.body = w.take();
  return {true, next};
}

std::optional<Bytes> unwrap_at_dest(Scheme scheme, CryptoEngine& engine, const SymKey* key, const Packet& pkt) {
  ByteReader r(pkt.body);
  r.u64();
  r.u64();
  auto rest = r.rest();
  switch (scheme) {
    case Scheme::None: return Bytes(rest.begin(), rest.end());
    case Scheme::EncOnly:
    case Scheme::Onion:
      if (!key) return std::nullopt;
      return engine.sym_decrypt(SealedBlob::parse(rest), *key);
    case Scheme::Learn:
    case Scheme::LearnHardened: break;
  }
  return std::nullopt;
}

BaselineHeader read_baseline_header(const Packet& pkt) {
  ByteReader r(pkt.body);
  BaselineHeader h;
  h.first = r.u64();
  h.second = r.u64();
  return h;
}

}  // namespace learn
