#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "learn/common.hpp"
#include "learn/field.hpp"

namespace learn {

/// A point on the session polynomial together with its Lagrange basis value at zero.
struct SharePoint {
  FieldElement x;
  FieldElement y;
  FieldElement b;

  friend bool operator==(const SharePoint&, const SharePoint&) = default;
};

/// a0 + a1 x + ... + ak x^k; a0 is the secret.
struct SecretPolynomial {
  std::vector<FieldElement> coefficients;

  std::size_t degree() const noexcept { return coefficients.empty() ? 0 : coefficients.size() - 1; }
  FieldElement evaluate(const PrimeField& field, FieldElement x) const noexcept;
};

/// k+1 points with pairwise distinct nonzero abscissas; points[0] belongs to the source.
struct ShareSet {
  std::vector<SharePoint> points;
  std::uint64_t modulus = 0;

  friend bool operator==(const ShareSet&, const ShareSet&) = default;
};

struct SharedSecret {
  SecretPolynomial polynomial;
  ShareSet set;
};

/// b_j = prod_{i != j} x_i / (x_i - x_j), in input order.
/// Throws InvalidAbscissaError on an empty set, a zero, or a duplicate.
std::vector<FieldElement> lagrange_coeffs(const PrimeField& field, std::span<const FieldElement> xs);

/// sum_j b_j * y_j.
FieldElement interpolate_at_zero(const PrimeField& field, std::span<const SharePoint> points);

/// Samples a random polynomial of degree node_count-1 and node_count distinct nonzero abscissas.
SharedSecret generate_share_set(const PrimeField& field, std::size_t node_count, Rng& rng);

/// y'_0 such that y'_0 b_0 + sum_{i>=1} b_i y_i = message.
FieldElement encode_message(const PrimeField& field, FieldElement message, const ShareSet& set);

/// partial + share.y * share.b
FieldElement accumulate(const PrimeField& field, FieldElement partial, const SharePoint& share) noexcept;

/// x0 + delta. Callers redraw delta if the result is zero or hits a known abscissa.
FieldElement next_x0(const PrimeField& field, FieldElement x0, FieldElement delta) noexcept;

/// Re-targets share.b to the abscissa set where x0_old is replaced by x0_new.
/// Throws EvolutionCollisionError when either x0 is zero or equals share.x.
SharePoint evolve_share(const PrimeField& field, const SharePoint& share, FieldElement x0_old,
                        FieldElement x0_new);

/// Uniform draw from [1, p-1].
FieldElement random_nonzero(const PrimeField& field, Rng& rng);

// Message blocking. Payload bits are packed little-endian into 60-bit blocks,
// so each block is below 2^61 - 1.
inline constexpr unsigned kBlockBits = 60;

std::size_t block_count(std::size_t payload_bytes) noexcept;
std::vector<FieldElement> pack_blocks(std::span<const std::uint8_t> payload);
Bytes unpack_blocks(std::span<const FieldElement> blocks, std::size_t payload_bytes);

}  // namespace learn
