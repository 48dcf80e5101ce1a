#include "learn/sharing.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

namespace learn {

FieldElement SecretPolynomial::evaluate(const PrimeField& field, FieldElement x) const noexcept {
  FieldElement acc = field.zero();
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
    acc = field.add(field.mul(acc, x), *it);
  }
  return acc;
}

std::vector<FieldElement> lagrange_coeffs(const PrimeField& field, std::span<const FieldElement> xs) {
  if (xs.empty()) throw InvalidAbscissaError("empty abscissa set");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(xs.size());
  for (FieldElement x : xs) {
    if (x.is_zero()) throw InvalidAbscissaError("abscissa 0 is reserved for the secret");
    if (!seen.insert(x.value).second) {
      throw InvalidAbscissaError("duplicate abscissa " + std::to_string(x.value));
    }
  }

  std::vector<FieldElement> out;
  out.reserve(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    FieldElement num = field.one();
    FieldElement den = field.one();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i == j) continue;
      num = field.mul(num, xs[i]);
      den = field.mul(den, field.sub(xs[i], xs[j]));
    }
    out.push_back(field.div(num, den));
  }
  return out;
}

FieldElement interpolate_at_zero(const PrimeField& field, std::span<const SharePoint> points) {
  FieldElement acc = field.zero();
  for (const SharePoint& p : points) acc = accumulate(field, acc, p);
  return acc;
}

FieldElement random_nonzero(const PrimeField& field, Rng& rng) {
  std::uniform_int_distribution<std::uint64_t> dist(1, field.modulus() - 1);
  return {dist(rng)};
}

SharedSecret generate_share_set(const PrimeField& field, std::size_t node_count, Rng& rng) {
  if (node_count < 2) throw ProtocolError("a share set needs at least two nodes");
  if (node_count >= field.modulus()) {
    throw InvalidAbscissaError("field too small for " + std::to_string(node_count) + " distinct abscissas");
  }

  SharedSecret out;
  std::uniform_int_distribution<std::uint64_t> any(0, field.modulus() - 1);
  out.polynomial.coefficients.resize(node_count);
  for (auto& c : out.polynomial.coefficients) c = {any(rng)};

  std::vector<FieldElement> xs;
  xs.reserve(node_count);
  std::unordered_set<std::uint64_t> used;
  while (xs.size() < node_count) {
    FieldElement x = random_nonzero(field, rng);
    if (used.insert(x.value).second) xs.push_back(x);
  }

  auto bs = lagrange_coeffs(field, xs);
  out.set.modulus = field.modulus();
  out.set.points.reserve(node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    out.set.points.push_back({xs[i], out.polynomial.evaluate(field, xs[i]), bs[i]});
  }
  return out;
}

FieldElement encode_message(const PrimeField& field, FieldElement message, const ShareSet& set) {
  if (set.points.empty()) throw DegenerateShareError("empty share set");
  const SharePoint& own = set.points.front();
  if (own.b.is_zero()) throw DegenerateShareError("source coefficient b0 is zero");
  FieldElement rest = field.zero();
  for (std::size_t i = 1; i < set.points.size(); ++i) rest = accumulate(field, rest, set.points[i]);
  return field.div(field.sub(message, rest), own.b);
}

FieldElement accumulate(const PrimeField& field, FieldElement partial, const SharePoint& share) noexcept {
  return field.add(partial, field.mul(share.y, share.b));
}

FieldElement next_x0(const PrimeField& field, FieldElement x0, FieldElement delta) noexcept {
  return field.add(x0, delta);
}

SharePoint evolve_share(const PrimeField& field, const SharePoint& share, FieldElement x0_old,
                        FieldElement x0_new) {
  if (x0_old.is_zero() || x0_new.is_zero() || x0_old == share.x || x0_new == share.x) {
    throw EvolutionCollisionError("x0 substitution " + std::to_string(x0_old.value) + " -> " +
                                  std::to_string(x0_new.value) + " collides at x=" +
                                  std::to_string(share.x.value));
  }
  // b' = b * x0'/(x0' - x) * (x0 - x)/x0
  FieldElement num = field.mul(x0_new, field.sub(x0_old, share.x));
  FieldElement den = field.mul(field.sub(x0_new, share.x), x0_old);
  SharePoint out = share;
  out.b = field.mul(share.b, field.div(num, den));
  return out;
}

std::size_t block_count(std::size_t payload_bytes) noexcept {
  std::size_t bits = payload_bytes * 8;
  return std::max<std::size_t>(1, (bits + kBlockBits - 1) / kBlockBits);
}

std::vector<FieldElement> pack_blocks(std::span<const std::uint8_t> payload) {
  std::vector<FieldElement> blocks(block_count(payload.size()));
  for (std::size_t bit = 0; bit < payload.size() * 8; ++bit) {
    if ((payload[bit / 8] >> (bit % 8)) & 1) {
      blocks[bit / kBlockBits].value |= std::uint64_t{1} << (bit % kBlockBits);
    }
  }
  return blocks;
}

Bytes unpack_blocks(std::span<const FieldElement> blocks, std::size_t payload_bytes) {
  if (blocks.size() < block_count(payload_bytes)) throw ParseError("too few message blocks for payload");
  Bytes out(payload_bytes, 0);
  for (std::size_t bit = 0; bit < payload_bytes * 8; ++bit) {
    if ((blocks[bit / kBlockBits].value >> (bit % kBlockBits)) & 1) {
      out[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
    }
  }
  return out;
}

}  // namespace learn
