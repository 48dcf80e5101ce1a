#pragma once

#include <compare>
#include <cstdint>

#include "learn/common.hpp"

namespace learn {

/// An element of GF(p). The modulus lives in the PrimeField that produced it.
struct FieldElement {
  std::uint64_t value = 0;

  constexpr bool is_zero() const noexcept { return value == 0; }
  friend constexpr auto operator<=>(FieldElement, FieldElement) = default;
};

/// Arithmetic context for a prime field. Moduli up to 2^63 are supported;
/// p = 2^61 - 1 takes a shift-and-add reduction path.
class PrimeField {
 public:
  static constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

  /// Throws ArithmeticError if `modulus` is not a prime below 2^63.
  explicit PrimeField(std::uint64_t modulus);

  static const PrimeField& mersenne61();

  std::uint64_t modulus() const noexcept { return p_; }

  FieldElement element(std::uint64_t v) const noexcept { return {v % p_}; }
  FieldElement zero() const noexcept { return {0}; }
  FieldElement one() const noexcept { return {1}; }

  FieldElement add(FieldElement a, FieldElement b) const noexcept {
    std::uint64_t s = a.value + b.value;
    return {s >= p_ ? s - p_ : s};
  }
  FieldElement sub(FieldElement a, FieldElement b) const noexcept {
    return {a.value >= b.value ? a.value - b.value : a.value + p_ - b.value};
  }
  FieldElement neg(FieldElement a) const noexcept { return {a.value == 0 ? 0 : p_ - a.value}; }
  FieldElement mul(FieldElement a, FieldElement b) const noexcept;
  /// Throws ArithmeticError on zero.
  FieldElement inv(FieldElement a) const;
  FieldElement div(FieldElement a, FieldElement b) const { return mul(a, inv(b)); }
  FieldElement pow(FieldElement base, std::uint64_t exp) const noexcept;

  friend bool operator==(const PrimeField& a, const PrimeField& b) noexcept { return a.p_ == b.p_; }

 private:
  std::uint64_t p_;
  bool mersenne_;
};

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n) noexcept;

}  // namespace learn
