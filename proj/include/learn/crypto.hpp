#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_set>

#include "learn/common.hpp"
#include "learn/wire.hpp"

namespace learn {

/// 128-bit opaque token: key material, key ids, session ids, rho.
struct Token128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  bool is_zero() const noexcept { return lo == 0 && hi == 0; }
  friend constexpr auto operator<=>(const Token128&, const Token128&) = default;
};

struct Token128Hash {
  std::size_t operator()(const Token128& t) const noexcept { return mix64(t.lo ^ mix64(t.hi)); }
};

inline void write_token(ByteWriter& w, const Token128& t) { w.u64(t.lo).u64(t.hi); }
inline Token128 read_token(ByteReader& r) {
  Token128 t;
  t.lo = r.u64();
  t.hi = r.u64();
  return t;
}

using PublicId = Token128;

struct KeyPair {
  PublicId public_id;
  Token128 secret;
  bool one_time = false;
};

struct SymKey {
  Token128 key;

  friend bool operator==(const SymKey&, const SymKey&) = default;
};

/// Cycle charges for the cost-modelled primitives.
struct CostModel {
  std::uint32_t enc_cycles = 12;
  std::uint32_t dec_cycles = 12;
  std::uint32_t polygen_cycles = 200;
};

/// One sealed layer: key hint (nonce || keyed check value), integrity tag, ciphertext.
/// Nesting is done by sealing the serialized inner blob, so every layer adds
/// kOverheadBytes (128-bit key id + 64-bit tag) to the wire size.
struct SealedBlob {
  static constexpr std::size_t kOverheadBytes = 24;

  Token128 key_hint;
  std::uint64_t tag = 0;
  Bytes ciphertext;
  std::uint32_t layers = 1;

  std::uint64_t size_bits() const noexcept { return 8 * (kOverheadBytes + ciphertext.size()); }
  void write(ByteWriter& w) const;
  Bytes serialize() const;
  /// Consumes the whole span. The layer count is not on the wire.
  static SealedBlob parse(std::span<const std::uint8_t> in);
};

/// Keyed invertible transform with an integrity tag standing in for real ciphers.
/// Every primitive call is charged to this engine's cycle account. One-time key
/// pairs are refused after their first successful open.
class CryptoEngine {
 public:
  CryptoEngine(CostModel costs, std::uint64_t seed);

  KeyPair keypair_gen(bool one_time);
  SymKey symkey_gen();
  Token128 random_token();
  std::uint64_t random_u64();

  SealedBlob sym_encrypt(std::span<const std::uint8_t> plaintext, const SymKey& key,
                         std::uint32_t inner_layers = 0);
  std::optional<Bytes> sym_decrypt(const SealedBlob& blob, const SymKey& key);

  SealedBlob asym_seal(std::span<const std::uint8_t> plaintext, const PublicId& pk,
                       std::uint32_t inner_layers = 0);
  /// nullopt if `keys` does not open the blob. Throws StaleKeyError on reuse of a spent one-time pair.
  std::optional<Bytes> asym_open(const SealedBlob& blob, const KeyPair& keys);

  void charge_polygen() noexcept { cycles_ += costs_.polygen_cycles; }

  std::uint64_t cycles_charged() const noexcept { return cycles_; }
  const CostModel& costs() const noexcept { return costs_; }

  /// Hint check only; costs nothing and reveals nothing without the key.
  static bool addressed_to(const SealedBlob& blob, const PublicId& pk) noexcept;
  static bool addressed_to(const SealedBlob& blob, const SymKey& key) noexcept;

  static PublicId public_from_secret(const Token128& secret) noexcept;

 private:
  SealedBlob seal(std::span<const std::uint8_t> plaintext, const Token128& material, std::uint64_t domain,
                  std::uint32_t inner_layers);
  std::optional<Bytes> open(const SealedBlob& blob, const Token128& material, std::uint64_t domain) const;

  CostModel costs_;
  Rng rng_;
  std::uint64_t cycles_ = 0;
  std::unordered_set<Token128, Token128Hash> spent_;
};

}  // namespace learn
