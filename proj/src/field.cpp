#include "learn/field.hpp"

#include <array>
#include <string>

namespace learn {

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) noexcept {
  return static_cast<std::uint64_t>((static_cast<u128>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) noexcept {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e != 0) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) noexcept {
  if (n < 2) return false;
  constexpr std::array<std::uint64_t, 12> bases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t q : bases) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : bases) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t modulus) : p_(modulus), mersenne_(modulus == kMersenne61) {
  if (modulus >= (std::uint64_t{1} << 63) || !is_prime_u64(modulus)) {
    throw ArithmeticError("field modulus " + std::to_string(modulus) + " is not a prime below 2^63");
  }
}

const PrimeField& PrimeField::mersenne61() {
  static const PrimeField field(kMersenne61);
  return field;
}

FieldElement PrimeField::mul(FieldElement a, FieldElement b) const noexcept {
  if (mersenne_) {
    u128 z = static_cast<u128>(a.value) * b.value;
    std::uint64_t lo = static_cast<std::uint64_t>(z) & kMersenne61;
    std::uint64_t hi = static_cast<std::uint64_t>(z >> 61);
    std::uint64_t s = lo + hi;
    if (s >= kMersenne61) s -= kMersenne61;
    return {s};
  }
  return {mulmod(a.value, b.value, p_)};
}

FieldElement PrimeField::inv(FieldElement a) const {
  if (a.value == 0) throw ArithmeticError("inversion of zero");
  // Extended Euclid on signed 128-bit to stay clear of overflow near 2^63.
  __int128 t = 0, new_t = 1;
  __int128 r = p_, new_r = a.value;
  while (new_r != 0) {
    __int128 q = r / new_r;
    __int128 tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (t < 0) t += p_;
  return {static_cast<std::uint64_t>(t)};
}

FieldElement PrimeField::pow(FieldElement base, std::uint64_t exp) const noexcept {
  FieldElement r = one();
  while (exp != 0) {
    if (exp & 1) r = mul(r, base);
    base = mul(base, base);
    exp >>= 1;
  }
  return r;
}

}  // namespace learn
