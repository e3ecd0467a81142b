//
// Copyright 2026 The Legion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LEGION_LEDGER_HPP_
#define LEGION_LEDGER_HPP_

#include <cstdint>
#include <iosfwd>
#include <set>
#include <vector>

#include "legion/bytes.hpp"
#include "legion/merkle.hpp"

namespace legion {

// Tamper-evident append-only hash chain anchoring digests of published CTI
// bundles, revocations, and inventory-commitment anchors. Single writer by
// contract; reads are safe concurrently with no writer.
//
// Revocation is a tombstone: a Revoke entry names an earlier Publish payload
// digest and removes it from the active view without touching history.

enum class EntryKind : uint8_t {
  Publish = 0,
  Revoke = 1,
  CommitmentAnchor = 2,
};

// Genesis: entry 0 links to SHA-256 of this domain-separation tag.
inline constexpr std::string_view kLedgerGenesisTag = "legion-ledger-v1";

struct LedgerEntry {
  uint64_t seq = 0;
  Digest prev_digest{};
  Digest payload_digest{};
  EntryKind kind = EntryKind::Publish;
  std::array<uint8_t, 32> author{};
  uint64_t tick = 0;
  Digest entry_digest{};

  // The digested byte image: seq, prev, payload, kind, author, tick
  // (integers little-endian).
  Bytes digest_preimage() const;
  Digest compute_digest() const;

  bool operator==(const LedgerEntry&) const = default;
};

class Ledger {
 public:
  const LedgerEntry& append(EntryKind kind, const Digest& payload_digest,
                            const std::array<uint8_t, 32>& author, uint64_t tick);

  // Tombstone for a previously published digest; throws UnknownTarget if the
  // digest was never published.
  const LedgerEntry& revoke(const Digest& target_payload_digest,
                            const std::array<uint8_t, 32>& author, uint64_t tick);

  // True iff every entry digest recomputes and every prev link matches.
  bool verify_chain() const;

  // All Publish payload digests not named by any later Revoke entry.
  std::set<Digest> active_view() const;

  // True iff the digest appears in a Revoke entry.
  bool is_revoked(const Digest& payload_digest) const;

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const LedgerEntry& at(size_t i) const { return entries_.at(i); }
  const std::vector<LedgerEntry>& entries() const { return entries_; }

  // On-disk format: per entry a u32 little-endian length followed by the
  // entry image (preimage || entry_digest), concatenated in seq order.
  void write(std::ostream& out) const;
  static Ledger read(std::istream& in);  // throws ParseError

 private:
  std::vector<LedgerEntry> entries_;
};

// Chain verification over externally loaded entries (e.g. from a file).
bool verify_chain(const std::vector<LedgerEntry>& entries);

}  // namespace legion

#endif  // LEGION_LEDGER_HPP_
