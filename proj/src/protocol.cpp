#include "learn/protocol.hpp"

#include <algorithm>

#include "learn/wire.hpp"

namespace learn {

namespace {

constexpr std::size_t kInnermostRaBytes = 16 + 8 + 16;
constexpr std::uint8_t kHasNext = 0x1;
constexpr std::uint8_t kHardened = 0x2;

struct RcLayer {
  SharePoint share;
  std::optional<std::uint64_t> next_vcn;
  bool hardened = false;
  FieldElement x0;
  std::uint64_t evo_seed = 0;
  std::optional<SealedBlob> inner;
};

Bytes encode_rc_layer(const RcLayer& l) {
  ByteWriter w;
  w.u64(l.share.x.value).u64(l.share.y.value).u64(l.share.b.value);
  std::uint8_t flags = (l.next_vcn ? kHasNext : 0) | (l.hardened ? kHardened : 0);
  w.u8(flags);
  if (l.next_vcn) w.u64(*l.next_vcn);
  if (l.hardened) w.u64(l.x0.value).u64(l.evo_seed);
  if (l.inner) l.inner->write(w);
  return w.take();
}

RcLayer decode_rc_layer(std::span<const std::uint8_t> in) {
  ByteReader r(in);
  RcLayer l;
  l.share.x = {r.u64()};
  l.share.y = {r.u64()};
  l.share.b = {r.u64()};
  std::uint8_t flags = r.u8();
  if (flags & kHasNext) l.next_vcn = r.u64();
  if (flags & kHardened) {
    l.hardened = true;
    l.x0 = {r.u64()};
    l.evo_seed = r.u64();
  }
  if (l.next_vcn) l.inner = SealedBlob::parse(r.rest());
  return l;
}

Bytes encode_ra_layer(const VcnKey& pair, const SealedBlob& inner) {
  ByteWriter w;
  w.u64(pair.vcn);
  write_token(w, pair.key.key);
  inner.write(w);
  return w.take();
}

Bytes encode_ra_innermost(const Token128& rho, const VcnKey& pair) {
  ByteWriter w;
  write_token(w, rho);
  w.u64(pair.vcn);
  write_token(w, pair.key.key);
  return w.take();
}

}  // namespace

Bytes RiBody::encode() const {
  ByteWriter w;
  write_token(w, opk);
  write_token(w, tpk);
  trapdoor.write(w);
  return w.take();
}

RiBody RiBody::decode(std::span<const std::uint8_t> body) {
  ByteReader r(body);
  RiBody b;
  b.opk = read_token(r);
  b.tpk = read_token(r);
  b.trapdoor = SealedBlob::parse(r.rest());
  return b;
}

Bytes DtBody::encode() const {
  ByteWriter w;
  w.u32(checksum);
  for (FieldElement p : partials) w.u64(p.value);
  return w.take();
}

DtBody DtBody::decode(std::span<const std::uint8_t> body) {
  ByteReader r(body);
  DtBody b;
  b.checksum = r.u32();
  if (r.remaining() % 8 != 0) throw ParseError("DT body is not a whole number of blocks");
  while (r.remaining() > 0) b.partials.push_back({r.u64()});
  return b;
}

FieldElement evolution_step(const PrimeField& field, FieldElement x0, std::uint64_t evo_seed,
                            std::uint64_t counter) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    FieldElement delta{1 + derive_seed(evo_seed, counter, attempt) % (field.modulus() - 1)};
    FieldElement next = next_x0(field, x0, delta);
    if (!next.is_zero()) return next;
  }
}

LearnNode::LearnNode(const PrimeField& field, LearnParams params, KeyPair global_keys, std::uint64_t seed)
    : field_(field),
      params_(params),
      global_(global_keys),
      engine_(params.costs, derive_seed(seed, 0x656e67ULL)),
      rng_(derive_seed(seed, 0x726e67ULL)) {}

std::uint64_t LearnNode::fresh_vcn() {
  for (;;) {
    std::uint64_t v = engine_.random_u64();
    if (v != 0 && !vcn_owner_.contains(v) && !routing_.contains(v)) return v;
  }
}

std::size_t LearnNode::keytable_bytes() const noexcept {
  std::size_t bytes = 0;
  for (const auto& [id, row] : key_table_) {
    bytes += kKeyRowBytes;
    if (row.pairs.size() > 1) bytes += (row.pairs.size() - 1) * kPadPairBytes;
  }
  return bytes;
}

void LearnNode::note_occupancy() { keytable_bytes_max_ = std::max(keytable_bytes_max_, keytable_bytes()); }

LearnNode::Initiated LearnNode::initiate_session(const PublicId& dst_pk) {
  SourceSession s;
  s.opk = engine_.keypair_gen(false);
  s.tpk = engine_.keypair_gen(true);
  s.rho = engine_.random_token();
  s.session_id = s.opk.public_id;
  s.hardened = params_.evolve;

  ByteWriter inner;
  write_token(inner, s.opk.public_id);
  write_token(inner, s.rho);
  Bytes trapdoor_plain = inner.take();

  RiBody body{s.opk.public_id, s.tpk.public_id, engine_.asym_seal(trapdoor_plain, dst_pk)};
  Packet ri{PacketKind::RI, 0, body.encode()};
  PublicId id = s.session_id;
  sessions_.emplace(id, std::move(s));
  return {id, std::move(ri)};
}

RiResult LearnNode::handle_ri(const Packet& ri, Port in_port) {
  RiBody body = RiBody::decode(ri.body);
  if (key_table_.contains(body.opk) || sessions_.contains(body.opk)) return {RiOutcome::Duplicate, {}, in_port};

  auto opened = engine_.asym_open(body.trapdoor, global_);
  if (opened) {
    ByteReader r(*opened);
    PublicId inner_opk = read_token(r);
    Token128 rho = read_token(r);
    if (inner_opk != body.opk) return {RiOutcome::Tampered, {}, in_port};
    if (key_table_.size() >= params_.table_capacity) return {RiOutcome::TableFull, {}, in_port};

    KeyMappingRow row;
    row.session_id = body.opk;
    row.tpk_prev = body.tpk;
    row.prev_port = in_port;
    row.is_destination = true;
    for (std::uint32_t i = 0; i <= params_.pad_destination; ++i) {
      VcnKey pair{fresh_vcn(), engine_.symkey_gen()};
      vcn_owner_.emplace(pair.vcn, body.opk);
      row.pairs.push_back(pair);
    }

    SealedBlob onion = engine_.asym_seal(encode_ra_innermost(rho, row.pairs.front()), body.opk);
    for (std::size_t i = 1; i < row.pairs.size(); ++i) {
      onion = engine_.asym_seal(encode_ra_layer(row.pairs[i], onion), body.opk, onion.layers);
    }
    SealedBlob outer = engine_.asym_seal(onion.serialize(), body.tpk, onion.layers);

    RoutingRow stub;
    stub.vcn_in = row.pairs.back().vcn;
    stub.out_port = Port::Local;
    routing_.emplace(stub.vcn_in, std::move(stub));
    key_table_.emplace(body.opk, std::move(row));
    note_occupancy();
    return {RiOutcome::Accept, Packet{PacketKind::RA, 0, outer.serialize()}, in_port};
  }

  if (key_table_.size() >= params_.table_capacity) return {RiOutcome::TableFull, {}, in_port};
  KeyMappingRow row;
  row.session_id = body.opk;
  row.tpk_prev = body.tpk;
  row.tsk_self = engine_.keypair_gen(true);
  row.prev_port = in_port;
  RiBody fwd{body.opk, row.tsk_self->public_id, body.trapdoor};
  key_table_.emplace(body.opk, std::move(row));
  note_occupancy();
  return {RiOutcome::Forward, Packet{PacketKind::RI, 0, fwd.encode()}, in_port};
}

RaResult LearnNode::handle_ra(const Packet& ra, Port in_port) {
  SealedBlob outer = SealedBlob::parse(ra.body);

  for (auto& [id, s] : sessions_) {
    if (s.state == SourceSession::State::AwaitingRa && CryptoEngine::addressed_to(outer, s.tpk.public_id)) {
      return consume_ra(s, outer, in_port);
    }
  }

  for (auto& [id, row] : key_table_) {
    if (!row.tsk_self || row.is_destination || !row.tpk_prev) continue;
    if (!CryptoEngine::addressed_to(outer, row.tsk_self->public_id)) continue;
    auto plain = engine_.asym_open(outer, *row.tsk_self);
    if (!plain) return {RaOutcome::UnknownSession, {}, in_port, {}};
    SealedBlob onion = SealedBlob::parse(*plain);
    onion.layers = 0;
    for (std::uint32_t i = 0; i <= params_.pad_intermediate; ++i) {
      VcnKey pair{fresh_vcn(), engine_.symkey_gen()};
      vcn_owner_.emplace(pair.vcn, row.session_id);
      row.pairs.push_back(pair);
      onion = engine_.asym_seal(encode_ra_layer(pair, onion), row.session_id, onion.layers);
    }
    SealedBlob wrapped = engine_.asym_seal(onion.serialize(), *row.tpk_prev, onion.layers);

    RoutingRow stub;
    stub.vcn_in = row.pairs.back().vcn;
    stub.out_port = in_port;
    routing_.emplace(stub.vcn_in, std::move(stub));
    note_occupancy();
    return {RaOutcome::Forward, Packet{PacketKind::RA, 0, wrapped.serialize()}, row.prev_port, row.session_id};
  }
  return {RaOutcome::UnknownSession, {}, in_port, {}};
}

RaResult LearnNode::consume_ra(SourceSession& s, const SealedBlob& outer, Port in_port) {
  auto plain = engine_.asym_open(outer, s.tpk);
  if (!plain) return {RaOutcome::UnknownSession, {}, in_port, s.session_id};

  std::vector<VcnKey> pairs;
  SealedBlob layer = SealedBlob::parse(*plain);
  for (;;) {
    auto opened = engine_.asym_open(layer, s.opk);
    if (!opened) {
      s.state = SourceSession::State::Aborted;
      return {RaOutcome::Rejected, {}, in_port, s.session_id};
    }
    ByteReader r(*opened);
    if (opened->size() == kInnermostRaBytes) {
      Token128 rho = read_token(r);
      VcnKey pair;
      pair.vcn = r.u64();
      pair.key.key = read_token(r);
      pairs.push_back(pair);
      if (rho != s.rho) {
        s.state = SourceSession::State::Aborted;
        return {RaOutcome::Rejected, {}, in_port, s.session_id};
      }
      break;
    }
    VcnKey pair;
    pair.vcn = r.u64();
    pair.key.key = read_token(r);
    pairs.push_back(pair);
    layer = SealedBlob::parse(r.rest());
  }

  s.collected = std::move(pairs);
  s.first_port = in_port;
  Packet rc = build_rc(s);
  s.state = SourceSession::State::Established;
  return {RaOutcome::Established, std::move(rc), in_port, s.session_id};
}

Packet LearnNode::build_rc(SourceSession& s) {
  engine_.charge_polygen();
  SharedSecret secret = generate_share_set(field_, s.collected.size() + 1, rng_);
  s.share_set = std::move(secret.set);
  s.x0_orig = s.x0_cur = s.share_set.points.front().x;
  s.evo_seed = s.hardened ? rng_() : 0;

  std::optional<SealedBlob> inner;
  for (std::size_t j = s.collected.size(); j >= 1; --j) {
    RcLayer l;
    l.share = s.share_set.points[j];
    if (j < s.collected.size()) l.next_vcn = s.collected[j].vcn;
    l.hardened = s.hardened;
    l.x0 = s.x0_orig;
    l.evo_seed = s.evo_seed;
    l.inner = inner;
    std::uint32_t depth = inner ? inner->layers : 0;
    inner = engine_.sym_encrypt(encode_rc_layer(l), s.collected[j - 1].key, depth);
  }
  s.first_vcn = s.collected.front().vcn;
  return Packet{PacketKind::RC, s.first_vcn, inner->serialize()};
}

RcResult LearnNode::handle_rc(const Packet& rc) {
  auto owner = vcn_owner_.find(rc.vcn);
  if (owner == vcn_owner_.end()) return {RcOutcome::Misrouted, {}, Port::Local, {}};
  PublicId session_id = owner->second;
  KeyMappingRow& row = key_table_.at(session_id);
  auto route = routing_.find(rc.vcn);
  if (route == routing_.end() || route->second.complete) return {RcOutcome::Misrouted, {}, Port::Local, session_id};
  RoutingRow& rr = route->second;

  auto key_for = [&row](std::uint64_t vcn) -> const SymKey* {
    for (const auto& p : row.pairs) {
      if (p.vcn == vcn) return &p.key;
    }
    return nullptr;
  };

  SealedBlob blob = SealedBlob::parse(rc.body);
  std::uint64_t vcn = rc.vcn;
  std::vector<SharePoint> shares;
  RcLayer layer;
  for (;;) {
    const SymKey* key = key_for(vcn);
    auto plain = key ? engine_.sym_decrypt(blob, *key) : std::nullopt;
    if (!plain) return {RcOutcome::Misrouted, {}, Port::Local, session_id};
    layer = decode_rc_layer(*plain);
    shares.push_back(layer.share);
    if (!layer.next_vcn) break;
    const SymKey* next_key = key_for(*layer.next_vcn);
    if (!next_key || !CryptoEngine::addressed_to(*layer.inner, *next_key)) break;
    vcn = *layer.next_vcn;
    blob = *layer.inner;
  }

  rr.shares = std::move(shares);
  rr.vcn_out = layer.next_vcn;
  rr.hardened = layer.hardened;
  rr.x0_orig = rr.x0_cur = layer.x0;
  rr.evo_seed = layer.evo_seed;
  rr.counter = 0;
  rr.complete = true;
  row.rc_done = true;
  row.tpk_prev.reset();
  row.tsk_self.reset();

  if (!layer.next_vcn) return {RcOutcome::Terminal, {}, Port::Local, session_id};
  return {RcOutcome::Forward, Packet{PacketKind::RC, *layer.next_vcn, layer.inner->serialize()}, rr.out_port,
          session_id};
}

Packet LearnNode::send_dt(const PublicId& session, std::span<const std::uint8_t> payload) {
  auto it = sessions_.find(session);
  if (it == sessions_.end() || it->second.state != SourceSession::State::Established) {
    throw ProtocolError("DT requested on a session that is not established");
  }
  SourceSession& s = it->second;

  ShareSet set = s.share_set;
  if (s.hardened) {
    ++s.dt_sent;
    s.x0_cur = evolution_step(field_, s.x0_cur, s.evo_seed, s.dt_sent);
    std::vector<FieldElement> xs;
    xs.reserve(set.points.size());
    xs.push_back(s.x0_cur);
    for (std::size_t i = 1; i < set.points.size(); ++i) {
      if (set.points[i].x == s.x0_cur) {
        throw EvolutionCollisionError("evolved x0 coincides with a path abscissa");
      }
      xs.push_back(set.points[i].x);
    }
    auto bs = lagrange_coeffs(field_, xs);
    set.points[0].x = s.x0_cur;
    for (std::size_t i = 0; i < bs.size(); ++i) set.points[i].b = bs[i];
  } else {
    ++s.dt_sent;
  }

  DtBody body;
  body.checksum = checksum32(payload);
  const FieldElement b0 = set.points.front().b;
  for (FieldElement m : pack_blocks(payload)) {
    body.partials.push_back(field_.mul(encode_message(field_, m, set), b0));
  }
  return Packet{PacketKind::DT, s.first_vcn, body.encode()};
}

DtResult LearnNode::forward_dt(Packet& dt) {
  auto it = routing_.find(dt.vcn);
  if (it == routing_.end()) return {DtOutcome::Unknown, Port::Local, {}, 0};
  RoutingRow& row = it->second;
  if (!row.complete) return {DtOutcome::Wait, Port::Local, {}, 0};

  DtBody body = DtBody::decode(dt.body);
  FieldElement delta = field_.zero();
  if (row.hardened) {
    ++row.counter;
    row.x0_cur = evolution_step(field_, row.x0_cur, row.evo_seed, row.counter);
    for (const SharePoint& share : row.shares) {
      if (share.x == row.x0_cur) return {DtOutcome::Collision, Port::Local, {}, 0};
      delta = accumulate(field_, delta, evolve_share(field_, share, row.x0_orig, row.x0_cur));
    }
  } else {
    for (const SharePoint& share : row.shares) delta = accumulate(field_, delta, share);
  }
  for (FieldElement& p : body.partials) p = field_.add(p, delta);

  if (!row.vcn_out) {
    DtResult out{DtOutcome::Deliver, Port::Local, {}, 0};
    out.blocks = std::move(body.partials);
    out.checksum = body.checksum;
    return out;
  }
  dt.vcn = *row.vcn_out;
  dt.body = body.encode();
  return {DtOutcome::Forward, row.out_port, {}, 0};
}

void LearnNode::abort_session(const PublicId& session) {
  auto it = sessions_.find(session);
  if (it != sessions_.end()) it->second.state = SourceSession::State::Aborted;
}

void LearnNode::close_session(const PublicId& session) { sessions_.erase(session); }

void LearnNode::teardown(std::uint64_t vcn_in) {
  auto owner = vcn_owner_.find(vcn_in);
  if (owner == vcn_owner_.end()) return;
  PublicId id = owner->second;
  auto row = key_table_.find(id);
  if (row != key_table_.end()) {
    for (const auto& p : row->second.pairs) {
      vcn_owner_.erase(p.vcn);
      routing_.erase(p.vcn);
    }
    key_table_.erase(row);
  }
}

const SourceSession* LearnNode::session(const PublicId& id) const {
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : &it->second;
}

const RoutingRow* LearnNode::routing_row(std::uint64_t vcn_in) const {
  auto it = routing_.find(vcn_in);
  return it == routing_.end() ? nullptr : &it->second;
}

const KeyMappingRow* LearnNode::key_row(const PublicId& session_id) const {
  auto it = key_table_.find(session_id);
  return it == key_table_.end() ? nullptr : &it->second;
}

std::vector<RowKnowledge> LearnNode::knowledge_audit() const {
  std::vector<RowKnowledge> out;
  for (const auto& [vcn, row] : routing_) {
    RowKnowledge k;
    k.vcn_in = vcn;
    k.vcn_out = row.vcn_out;
    if (row.out_port != Port::Local) k.next_port = row.out_port;
    auto owner = vcn_owner_.find(vcn);
    if (owner != vcn_owner_.end()) {
      const KeyMappingRow& km = key_table_.at(owner->second);
      k.prev_port = km.prev_port;
    }
    out.push_back(k);
  }
  std::sort(out.begin(), out.end(), [](const RowKnowledge& a, const RowKnowledge& b) { return a.vcn_in < b.vcn_in; });
  return out;
}

Bytes LearnNode::serialize_state() const {
  ByteWriter w;
  for (const auto& [id, row] : key_table_) {
    write_token(w, row.session_id);
    if (row.tpk_prev) write_token(w, *row.tpk_prev);
    if (row.tsk_self) {
      write_token(w, row.tsk_self->public_id);
      write_token(w, row.tsk_self->secret);
    }
    for (const auto& p : row.pairs) {
      w.u64(p.vcn);
      write_token(w, p.key.key);
    }
    w.u8(static_cast<std::uint8_t>(row.prev_port));
  }
  for (const auto& [vcn, row] : routing_) {
    w.u64(row.vcn_in).u64(row.vcn_out.value_or(0)).u8(static_cast<std::uint8_t>(row.out_port));
    for (const auto& s : row.shares) w.u64(s.x.value).u64(s.y.value).u64(s.b.value);
    w.u64(row.x0_orig.value).u64(row.evo_seed).u64(row.counter);
  }
  return w.take();
}

}  // namespace learn
