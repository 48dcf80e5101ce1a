#include "learn/crypto.hpp"

namespace learn {

namespace {

constexpr std::uint64_t kSymDomain = 0x53594d4b45590001ULL;
constexpr std::uint64_t kAsymDomain = 0x41534d4b45590002ULL;
constexpr std::uint64_t kTagDomain = 0x5441470000000003ULL;

std::uint64_t prf(const Token128& material, std::uint64_t domain, std::uint64_t nonce,
                  std::span<const std::uint8_t> data = {}) noexcept {
  std::uint64_t h = mix64(material.lo ^ domain);
  h = mix64(h ^ material.hi);
  h = mix64(h ^ nonce);
  std::size_t i = 0;
  for (; i + 8 <= data.size(); i += 8) {
    std::uint64_t chunk = 0;
    for (int k = 0; k < 8; ++k) chunk |= static_cast<std::uint64_t>(data[i + k]) << (8 * k);
    h = mix64(h ^ chunk);
  }
  std::uint64_t tail = 0;
  for (int k = 0; i < data.size(); ++i, ++k) tail |= static_cast<std::uint64_t>(data[i]) << (8 * k);
  return mix64(h ^ tail ^ (static_cast<std::uint64_t>(data.size()) << 56));
}

void apply_keystream(Bytes& buf, const Token128& material, std::uint64_t domain, std::uint64_t nonce) {
  std::uint64_t block = 0;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    if (i % 8 == 0) block = prf(material, domain ^ 0x6b73ULL, nonce ^ mix64(i / 8 + 1));
    buf[i] ^= static_cast<std::uint8_t>(block >> (8 * (i % 8)));
  }
}

}  // namespace

void SealedBlob::write(ByteWriter& w) const {
  write_token(w, key_hint);
  w.u64(tag);
  w.bytes(ciphertext);
}

Bytes SealedBlob::serialize() const {
  ByteWriter w;
  write(w);
  return w.take();
}

SealedBlob SealedBlob::parse(std::span<const std::uint8_t> in) {
  ByteReader r(in);
  SealedBlob b;
  b.key_hint = read_token(r);
  b.tag = r.u64();
  auto rest = r.rest();
  b.ciphertext.assign(rest.begin(), rest.end());
  return b;
}

CryptoEngine::CryptoEngine(CostModel costs, std::uint64_t seed) : costs_(costs), rng_(seed) {}

Token128 CryptoEngine::random_token() {
  Token128 t;
  do {
    t.lo = rng_();
    t.hi = rng_();
  } while (t.is_zero());
  return t;
}

std::uint64_t CryptoEngine::random_u64() { return rng_(); }

PublicId CryptoEngine::public_from_secret(const Token128& secret) noexcept {
  return {mix64(secret.lo ^ 0x7075626c6963ULL), mix64(secret.hi ^ mix64(secret.lo))};
}

KeyPair CryptoEngine::keypair_gen(bool one_time) {
  KeyPair kp;
  kp.secret = random_token();
  kp.public_id = public_from_secret(kp.secret);
  kp.one_time = one_time;
  return kp;
}

SymKey CryptoEngine::symkey_gen() { return {random_token()}; }

SealedBlob CryptoEngine::seal(std::span<const std::uint8_t> plaintext, const Token128& material,
                              std::uint64_t domain, std::uint32_t inner_layers) {
  SealedBlob blob;
  std::uint64_t nonce = rng_();
  blob.key_hint = {nonce, prf(material, domain, nonce)};
  blob.tag = prf(material, domain ^ kTagDomain, nonce, plaintext);
  blob.ciphertext.assign(plaintext.begin(), plaintext.end());
  apply_keystream(blob.ciphertext, material, domain, nonce);
  blob.layers = inner_layers + 1;
  return blob;
}

std::optional<Bytes> CryptoEngine::open(const SealedBlob& blob, const Token128& material,
                                        std::uint64_t domain) const {
  std::uint64_t nonce = blob.key_hint.lo;
  if (blob.key_hint.hi != prf(material, domain, nonce)) return std::nullopt;
  Bytes plain = blob.ciphertext;
  apply_keystream(plain, material, domain, nonce);
  if (prf(material, domain ^ kTagDomain, nonce, plain) != blob.tag) return std::nullopt;
  return plain;
}

SealedBlob CryptoEngine::sym_encrypt(std::span<const std::uint8_t> plaintext, const SymKey& key,
                                     std::uint32_t inner_layers) {
  cycles_ += costs_.enc_cycles;
  return seal(plaintext, key.key, kSymDomain, inner_layers);
}

std::optional<Bytes> CryptoEngine::sym_decrypt(const SealedBlob& blob, const SymKey& key) {
  cycles_ += costs_.dec_cycles;
  return open(blob, key.key, kSymDomain);
}

SealedBlob CryptoEngine::asym_seal(std::span<const std::uint8_t> plaintext, const PublicId& pk,
                                   std::uint32_t inner_layers) {
  cycles_ += costs_.enc_cycles;
  return seal(plaintext, pk, kAsymDomain, inner_layers);
}

std::optional<Bytes> CryptoEngine::asym_open(const SealedBlob& blob, const KeyPair& keys) {
  if (keys.one_time && spent_.contains(keys.secret)) {
    throw StaleKeyError("one-time key pair reused after its first open");
  }
  cycles_ += costs_.dec_cycles;
  if (public_from_secret(keys.secret) != keys.public_id) return std::nullopt;
  auto plain = open(blob, keys.public_id, kAsymDomain);
  if (plain && keys.one_time) spent_.insert(keys.secret);
  return plain;
}

bool CryptoEngine::addressed_to(const SealedBlob& blob, const PublicId& pk) noexcept {
  return blob.key_hint.hi == prf(pk, kAsymDomain, blob.key_hint.lo);
}

bool CryptoEngine::addressed_to(const SealedBlob& blob, const SymKey& key) noexcept {
  return blob.key_hint.hi == prf(key.key, kSymDomain, blob.key_hint.lo);
}

}  // namespace learn
