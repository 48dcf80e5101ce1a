#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace learn {

using Bytes = std::vector<std::uint8_t>;
using Cycle = std::uint64_t;
using NodeId = std::uint32_t;
using Rng = std::mt19937_64;

/// Error categories surfaced to the CLI as distinct exit codes.
enum class ErrorCategory {
  Arithmetic = 10,
  Protocol = 11,
  Crypto = 12,
  Config = 2,
  Io = 3,
  Parse = 4,
  Simulation = 5,
  Comparison = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Inversion of zero, non-prime modulus.
class ArithmeticError : public Error {
 public:
  explicit ArithmeticError(const std::string& what) : Error(ErrorCategory::Arithmetic, what) {}
};

/// Duplicate or zero abscissa handed to interpolation.
class InvalidAbscissaError : public ArithmeticError {
 public:
  using ArithmeticError::ArithmeticError;
};

class DegenerateShareError : public ArithmeticError {
 public:
  using ArithmeticError::ArithmeticError;
};

/// Raised when an x0 substitution would coincide with a share abscissa.
class EvolutionCollisionError : public ArithmeticError {
 public:
  using ArithmeticError::ArithmeticError;
};

class StaleKeyError : public Error {
 public:
  explicit StaleKeyError(const std::string& what) : Error(ErrorCategory::Crypto, what) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what) : Error(ErrorCategory::Protocol, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCategory::Parse, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

class SimulationError : public Error {
 public:
  explicit SimulationError(const std::string& what) : Error(ErrorCategory::Simulation, what) {}
};

class ComparisonError : public Error {
 public:
  explicit ComparisonError(const std::string& what) : Error(ErrorCategory::Comparison, what) {}
};

/// SplitMix64 finalizer. Used for seed derivation and the keyed stand-ins.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and a list of salts.
template <typename... Salts>
constexpr std::uint64_t derive_seed(std::uint64_t base, Salts... salts) noexcept {
  std::uint64_t h = mix64(base);
  ((h = mix64(h ^ static_cast<std::uint64_t>(salts))), ...);
  return h;
}

}  // namespace learn
