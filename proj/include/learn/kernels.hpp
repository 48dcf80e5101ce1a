#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "learn/config.hpp"
#include "learn/field.hpp"
#include "learn/metrics.hpp"
#include "learn/sharing.hpp"

namespace learn {

// Each kernel has a serial reference and an OpenMP version that must return
// identical results for any thread count.

/// One independent simulation per configuration, results in input order.
std::vector<MetricsReport> run_sweep_serial(const std::vector<RunConfig>& configs);
std::vector<MetricsReport> run_sweep_parallel(const std::vector<RunConfig>& configs);

struct ShareCheck {
  std::uint64_t checked = 0;
  /// Sets whose interpolation at 0 missed the secret or whose coefficients do not sum to 1.
  std::uint64_t failures = 0;

  friend bool operator==(const ShareCheck&, const ShareCheck&) = default;
};

/// Draws `count` share sets of `points` points over GF(2^61-1), set i seeded from (seed, i), and
/// checks reconstruction.
ShareCheck verify_share_sets_serial(std::uint64_t seed, std::size_t count, std::size_t points);
ShareCheck verify_share_sets_parallel(std::uint64_t seed, std::size_t count, std::size_t points);

/// Enumerates every polynomial of degree < `terms` over a small field and, for those passing through
/// all `known` points, counts the value at 0. Entry v of the result is the count for secret v.
std::vector<std::uint64_t> secret_histogram_serial(const PrimeField& field, std::size_t terms,
                                                   std::span<const SharePoint> known);
std::vector<std::uint64_t> secret_histogram_parallel(const PrimeField& field, std::size_t terms,
                                                     std::span<const SharePoint> known);

}  // namespace learn
