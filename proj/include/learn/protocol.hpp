#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "learn/crypto.hpp"
#include "learn/field.hpp"
#include "learn/packet.hpp"
#include "learn/sharing.hpp"

namespace learn {

struct LearnParams {
  CostModel costs;
  std::size_t table_capacity = 256;
  /// Extra <nonce, key> pairs added by the destination to the RA.
  std::uint32_t pad_destination = 0;
  /// Extra pairs added by every intermediate router.
  std::uint32_t pad_intermediate = 0;
  /// Per-message x0 evolution.
  bool evolve = false;
};

/// Bytes per key-mapping row: session id, tpk_prev, tsk_self, vcn, key at 128 bits each.
inline constexpr std::size_t kKeyRowBytes = 5 * 16;
/// Bytes per additional padding pair held in a row: vcn and key at 128 bits each.
inline constexpr std::size_t kPadPairBytes = 2 * 16;

struct VcnKey {
  std::uint64_t vcn = 0;
  SymKey key;
};

struct KeyMappingRow {
  PublicId session_id;
  std::optional<PublicId> tpk_prev;
  std::optional<KeyPair> tsk_self;
  /// Innermost first. More than one only when this node pads.
  std::vector<VcnKey> pairs;
  Port prev_port = Port::Local;
  bool is_destination = false;
  bool rc_done = false;
};

struct RoutingRow {
  std::uint64_t vcn_in = 0;
  /// nullopt marks the terminal row at the destination.
  std::optional<std::uint64_t> vcn_out;
  Port out_port = Port::Local;
  std::vector<SharePoint> shares;
  bool complete = false;

  bool hardened = false;
  FieldElement x0_orig;
  FieldElement x0_cur;
  std::uint64_t evo_seed = 0;
  std::uint64_t counter = 0;
};

struct SourceSession {
  enum class State { AwaitingRa, Established, Aborted };

  PublicId session_id;
  KeyPair opk;
  KeyPair tpk;
  Token128 rho;
  State state = State::AwaitingRa;
  /// In peel order: first hop first, destination's innermost pair last.
  std::vector<VcnKey> collected;
  ShareSet share_set;
  std::uint64_t first_vcn = 0;
  Port first_port = Port::Local;

  bool hardened = false;
  FieldElement x0_orig;
  FieldElement x0_cur;
  std::uint64_t evo_seed = 0;
  std::uint64_t dt_sent = 0;
};

enum class RiOutcome { Forward, Accept, Duplicate, Tampered, TableFull };
enum class RaOutcome { Forward, Established, UnknownSession, Rejected, TableFull };
enum class RcOutcome { Forward, Terminal, Misrouted };
enum class DtOutcome { Forward, Deliver, Wait, Unknown, Collision };

struct RiResult {
  RiOutcome outcome = RiOutcome::Duplicate;
  /// Forward: the re-keyed RI (the caller picks ports). Accept: the RA.
  Packet packet;
  Port port = Port::Local;
};

struct RaResult {
  RaOutcome outcome = RaOutcome::UnknownSession;
  /// Forward: the wrapped RA. Established: the RC.
  Packet packet;
  Port port = Port::Local;
  PublicId session;
};

struct RcResult {
  RcOutcome outcome = RcOutcome::Misrouted;
  Packet packet;
  Port port = Port::Local;
  PublicId session;
};

struct DtResult {
  DtOutcome outcome = DtOutcome::Unknown;
  Port port = Port::Local;
  /// Deliver only.
  std::vector<FieldElement> blocks;
  std::uint32_t checksum = 0;
};

/// What a single router can learn about one session from its own tables.
struct RowKnowledge {
  std::uint64_t vcn_in = 0;
  std::optional<std::uint64_t> vcn_out;
  std::optional<Port> prev_port;
  std::optional<Port> next_port;
};

struct RiBody {
  PublicId opk;
  PublicId tpk;
  SealedBlob trapdoor;

  Bytes encode() const;
  static RiBody decode(std::span<const std::uint8_t> body);
};

struct DtBody {
  std::uint32_t checksum = 0;
  std::vector<FieldElement> partials;

  Bytes encode() const;
  static DtBody decode(std::span<const std::uint8_t> body);
};

/// x0 + delta with delta = 1 + H(seed, counter, attempt) mod (p-1), redrawn while the result is 0.
FieldElement evolution_step(const PrimeField& field, FieldElement x0, std::uint64_t evo_seed,
                            std::uint64_t counter);

/// Protocol state of one node: its global key pair, the key-mapping and routing
/// tables it keeps as a router, and the sessions it runs as a source.
class LearnNode {
 public:
  LearnNode(const PrimeField& field, LearnParams params, KeyPair global_keys, std::uint64_t seed);

  const PublicId& public_id() const noexcept { return global_.public_id; }
  CryptoEngine& engine() noexcept { return engine_; }
  const CryptoEngine& engine() const noexcept { return engine_; }
  const LearnParams& params() const noexcept { return params_; }

  struct Initiated {
    PublicId session;
    Packet ri;
  };
  Initiated initiate_session(const PublicId& dst_pk);

  RiResult handle_ri(const Packet& ri, Port in_port);
  RaResult handle_ra(const Packet& ra, Port in_port);
  RcResult handle_rc(const Packet& rc);

  /// Throws ProtocolError if the session is not established, EvolutionCollisionError on an x0 collision.
  Packet send_dt(const PublicId& session, std::span<const std::uint8_t> payload);
  /// Rewrites `dt` in place on Forward.
  DtResult forward_dt(Packet& dt);

  void abort_session(const PublicId& session);
  void close_session(const PublicId& session);
  /// Removes every table entry of the session whose routing row is keyed by vcn_in.
  void teardown(std::uint64_t vcn_in);

  const SourceSession* session(const PublicId& id) const;
  const RoutingRow* routing_row(std::uint64_t vcn_in) const;
  const KeyMappingRow* key_row(const PublicId& session_id) const;

  std::size_t key_rows() const noexcept { return key_table_.size(); }
  std::size_t routing_rows() const noexcept { return routing_.size(); }
  std::size_t keytable_bytes() const noexcept;
  std::size_t keytable_bytes_max() const noexcept { return keytable_bytes_max_; }

  std::vector<RowKnowledge> knowledge_audit() const;
  /// All table contents as bytes, for identifier scans of router state.
  Bytes serialize_state() const;

 private:
  std::uint64_t fresh_vcn();
  void note_occupancy();
  RaResult consume_ra(SourceSession& s, const SealedBlob& outer, Port in_port);
  Packet build_rc(SourceSession& s);

  const PrimeField& field_;
  LearnParams params_;
  KeyPair global_;
  CryptoEngine engine_;
  Rng rng_;

  std::unordered_map<PublicId, KeyMappingRow, Token128Hash> key_table_;
  std::unordered_map<std::uint64_t, PublicId> vcn_owner_;
  std::unordered_map<std::uint64_t, RoutingRow> routing_;
  std::unordered_map<PublicId, SourceSession, Token128Hash> sessions_;
  std::size_t keytable_bytes_max_ = 0;
};

}  // namespace learn
