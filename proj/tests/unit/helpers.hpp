#pragma once

#include <gtest/gtest.h>

#include <memory>
#include <vector>

#include "learn/protocol.hpp"

namespace learn::testing {

/// Plain modular arithmetic with 128-bit intermediates, independent of PrimeField.
inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}
inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}
inline std::uint64_t invmod(std::uint64_t a, std::uint64_t p) { return powmod(a, p - 2, p); }

/// Textbook Lagrange basis at 0: b_j = prod_{i != j} x_i / (x_i - x_j).
inline std::vector<std::uint64_t> lagrange_oracle(const std::vector<std::uint64_t>& xs, std::uint64_t p) {
  std::vector<std::uint64_t> out;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    std::uint64_t num = 1, den = 1;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i == j) continue;
      num = mulmod(num, xs[i], p);
      den = mulmod(den, (xs[i] + p - xs[j]) % p, p);
    }
    out.push_back(mulmod(num, invmod(den, p), p));
  }
  return out;
}

/// Nodes on a straight west-to-east line, node 0 the source and the last node the destination.
/// Packets travelling east arrive on the West port and vice versa.
class Line {
 public:
  Line(std::size_t n, LearnParams params, std::uint64_t seed, const PrimeField& field = PrimeField::mersenne61())
      : field_(field) {
    CryptoEngine provisioning(params.costs, seed ^ 0x5eedULL);
    for (std::size_t i = 0; i < n; ++i) {
      nodes.push_back(std::make_unique<LearnNode>(field, params, provisioning.keypair_gen(false), seed * 131 + i));
    }
  }

  LearnNode& at(std::size_t i) { return *nodes.at(i); }
  std::size_t size() const { return nodes.size(); }

  /// Runs RI, RA and RC end to end. Fails the calling test on any unexpected outcome.
  PublicId establish() {
    auto init = at(0).initiate_session(at(size() - 1).public_id());
    Packet ri = init.ri;
    std::size_t i = 1;
    Packet ra;
    for (;; ++i) {
      RiResult r = at(i).handle_ri(ri, Port::West);
      if (r.outcome == RiOutcome::Accept) {
        ra = r.packet;
        break;
      }
      EXPECT_EQ(r.outcome, RiOutcome::Forward) << "at node " << i;
      if (r.outcome != RiOutcome::Forward) return init.session;
      ri = r.packet;
    }
    EXPECT_EQ(i, size() - 1);
    Packet rc;
    for (std::size_t j = size() - 1; j-- > 0;) {
      RaResult r = at(j).handle_ra(ra, Port::East);
      if (j == 0) {
        EXPECT_EQ(r.outcome, RaOutcome::Established);
        rc = r.packet;
      } else {
        EXPECT_EQ(r.outcome, RaOutcome::Forward) << "at node " << j;
        EXPECT_EQ(r.port, Port::West);
        ra = r.packet;
      }
    }
    for (std::size_t j = 1; j < size(); ++j) {
      RcResult r = at(j).handle_rc(rc);
      if (j + 1 == size()) {
        EXPECT_EQ(r.outcome, RcOutcome::Terminal);
      } else {
        EXPECT_EQ(r.outcome, RcOutcome::Forward) << "at node " << j;
        EXPECT_EQ(r.port, Port::East);
        rc = r.packet;
      }
    }
    return init.session;
  }

  /// Sends one DT along the line and returns the recovered payload, or nothing on a failure.
  std::optional<Bytes> transfer(const PublicId& session, const Bytes& payload,
                                std::vector<std::pair<FieldElement, FieldElement>>* hop_blocks = nullptr) {
    Packet dt = at(0).send_dt(session, payload);
    for (std::size_t j = 1; j < size(); ++j) {
      FieldElement in = DtBody::decode(dt.body).partials.front();
      DtResult r = at(j).forward_dt(dt);
      if (r.outcome == DtOutcome::Deliver) {
        if (hop_blocks) hop_blocks->emplace_back(in, r.blocks.front());
        Bytes out = unpack_blocks(r.blocks, payload.size());
        if (checksum32(out) != r.checksum) return std::nullopt;
        return out;
      }
      if (r.outcome != DtOutcome::Forward) return std::nullopt;
      if (hop_blocks) hop_blocks->emplace_back(in, DtBody::decode(dt.body).partials.front());
    }
    return std::nullopt;
  }

  std::vector<std::unique_ptr<LearnNode>> nodes;

 private:
  const PrimeField& field_;
};

}  // namespace learn::testing
