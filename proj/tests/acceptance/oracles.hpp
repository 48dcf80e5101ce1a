#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "learn/baseline.hpp"
#include "learn/network.hpp"
#include "learn/protocol.hpp"

namespace learn::acceptance {

/// Modular arithmetic and Lagrange basis computed with 128-bit intermediates, independent of PrimeField.
std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t invmod(std::uint64_t a, std::uint64_t p);
std::vector<std::uint64_t> lagrange_oracle(const std::vector<std::uint64_t>& xs, std::uint64_t p);

/// Cycles a scheme charges for one packet with `hops` links between source and destination.
struct SchemeCosts {
  std::uint64_t source_work = 0;
  /// Stall at each router after the source, the destination last.
  std::vector<std::uint32_t> router_stalls;
};
SchemeCosts baseline_costs(Scheme scheme, int hops, std::uint32_t crypto_cycles);
SchemeCosts dt_costs(int hops, std::uint32_t dt_cycles);

/// Unloaded latency from NI hand-off to tail ejection: source work, three cycles
/// per router on the path (source and destination included), every router stall,
/// and one cycle per trailing flit.
std::uint64_t zero_load_latency(int hops, std::uint32_t flits, const SchemeCosts& costs);

/// Replays the pipeline by hand for one packet on an idle mesh and compares
/// every head stage and the tail ejection with the recorded events.
/// Returns an empty string on a match, otherwise the first discrepancy.
std::string check_event_log(const std::vector<TraceEvent>& events, const std::vector<NodeId>& routers,
                            Cycle handed, std::uint32_t flits, const SchemeCosts& costs);

/// LEARN nodes on a west-to-east line; node 0 is the source and the last node the destination.
class ProtocolLine {
 public:
  ProtocolLine(std::size_t n, LearnParams params, std::uint64_t seed);
  LearnNode& at(std::size_t i) { return *nodes_.at(i); }
  std::size_t size() const noexcept { return nodes_.size(); }
  /// Runs the full handshake; nullopt if any step deviates from the expected outcome.
  std::optional<PublicId> establish();
  /// One DT end to end. `hop_deltas` receives (router, out - in) on the first block.
  std::optional<Bytes> transfer(const PublicId& session, const Bytes& payload,
                                std::vector<std::pair<std::size_t, FieldElement>>* hop_deltas = nullptr);

 private:
  std::vector<std::unique_ptr<LearnNode>> nodes_;
};

}  // namespace learn::acceptance
