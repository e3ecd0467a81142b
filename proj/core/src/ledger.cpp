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

#include "legion/ledger.hpp"

#include <istream>
#include <ostream>

#include "legion/errors.hpp"
#include "legion/sha256.hpp"

namespace legion {
namespace {

Digest genesis_digest() { return sha256(kLedgerGenesisTag); }

constexpr size_t kPreimageSize = 8 + 32 + 32 + 1 + 32 + 8;       // 113
constexpr size_t kEntrySize = kPreimageSize + 32;                // + entry_digest

}  // namespace

Bytes LedgerEntry::digest_preimage() const {
  Bytes out;
  out.reserve(kPreimageSize);
  put_u64(out, seq);
  out.insert(out.end(), prev_digest.begin(), prev_digest.end());
  out.insert(out.end(), payload_digest.begin(), payload_digest.end());
  out.push_back(static_cast<uint8_t>(kind));
  out.insert(out.end(), author.begin(), author.end());
  put_u64(out, tick);
  return out;
}

Digest LedgerEntry::compute_digest() const {
  Bytes pre = digest_preimage();
  return sha256(ByteSpan(pre.data(), pre.size()));
}

const LedgerEntry& Ledger::append(EntryKind kind, const Digest& payload_digest,
                                  const std::array<uint8_t, 32>& author, uint64_t tick) {
  LedgerEntry e;
  e.seq = entries_.size();
  e.prev_digest = entries_.empty() ? genesis_digest() : entries_.back().entry_digest;
  e.payload_digest = payload_digest;
  e.kind = kind;
  e.author = author;
  e.tick = tick;
  e.entry_digest = e.compute_digest();
  entries_.push_back(std::move(e));
  return entries_.back();
}

const LedgerEntry& Ledger::revoke(const Digest& target_payload_digest,
                                  const std::array<uint8_t, 32>& author, uint64_t tick) {
  bool published = false;
  for (const auto& e : entries_) {
    if (e.kind == EntryKind::Publish && e.payload_digest == target_payload_digest) {
      published = true;
      break;
    }
  }
  if (!published) throw UnknownTarget("revoke: digest never published");
  return append(EntryKind::Revoke, target_payload_digest, author, tick);
}

bool verify_chain(const std::vector<LedgerEntry>& entries) {
  Digest prev = genesis_digest();
  for (size_t i = 0; i < entries.size(); ++i) {
    const LedgerEntry& e = entries[i];
    if (e.seq != i) return false;
    if (e.prev_digest != prev) return false;
    if (e.compute_digest() != e.entry_digest) return false;
    prev = e.entry_digest;
  }
  return true;
}

bool Ledger::verify_chain() const { return legion::verify_chain(entries_); }

std::set<Digest> Ledger::active_view() const {
  std::set<Digest> active;
  for (const auto& e : entries_) {
    if (e.kind == EntryKind::Publish) active.insert(e.payload_digest);
    else if (e.kind == EntryKind::Revoke) active.erase(e.payload_digest);
  }
  return active;
}

bool Ledger::is_revoked(const Digest& payload_digest) const {
  for (const auto& e : entries_)
    if (e.kind == EntryKind::Revoke && e.payload_digest == payload_digest) return true;
  return false;
}

void Ledger::write(std::ostream& out) const {
  for (const auto& e : entries_) {
    Bytes body = e.digest_preimage();
    body.insert(body.end(), e.entry_digest.begin(), e.entry_digest.end());
    Bytes rec;
    put_u32(rec, static_cast<uint32_t>(body.size()));
    rec.insert(rec.end(), body.begin(), body.end());
    out.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size()));
  }
}

Ledger Ledger::read(std::istream& in) {
  Ledger ledger;
  while (true) {
    uint8_t len_buf[4];
    in.read(reinterpret_cast<char*>(len_buf), 4);
    if (in.gcount() == 0 && in.eof()) break;
    if (in.gcount() != 4) throw ParseError("ledger read: truncated length prefix");
    uint32_t len = get_u32(ByteSpan(len_buf, 4), 0);
    if (len != kEntrySize) throw ParseError("ledger read: unexpected entry length");
    Bytes body(len);
    in.read(reinterpret_cast<char*>(body.data()), len);
    if (static_cast<uint32_t>(in.gcount()) != len) throw ParseError("ledger read: truncated entry");

    LedgerEntry e;
    ByteSpan b(body.data(), body.size());
    size_t off = 0;
    e.seq = get_u64(b, off);
    off += 8;
    std::copy_n(body.begin() + off, 32, e.prev_digest.begin());
    off += 32;
    std::copy_n(body.begin() + off, 32, e.payload_digest.begin());
    off += 32;
    if (body[off] > 2) throw ParseError("ledger read: unknown entry kind");
    e.kind = static_cast<EntryKind>(body[off]);
    off += 1;
    std::copy_n(body.begin() + off, 32, e.author.begin());
    off += 32;
    e.tick = get_u64(b, off);
    off += 8;
    std::copy_n(body.begin() + off, 32, e.entry_digest.begin());
    ledger.entries_.push_back(std::move(e));
  }
  return ledger;
}

}  // namespace legion
