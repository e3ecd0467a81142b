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

#ifndef LEGION_EXPOSURE_HPP_
#define LEGION_EXPOSURE_HPP_

#include <string>
#include <vector>

#include "legion/bytes.hpp"
#include "legion/merkle.hpp"

namespace legion {

// Commitment-based challenge-response exposure check. An organization
// commits to its component inventory as a Merkle root over salted item
// digests (anchorable on the ledger); a verifier issues a nonce; the prover
// opens exactly one leaf, binding root, item, salt and nonce together.
//
// The verifier learns that the committed inventory contains the named item
// and nothing else about it: a proof carries one item, its salt, and
// ~log2(n) opaque digests. The per-item salts (16-byte secrets held by the
// owner) keep the other leaves unguessable. Proving the *absence* of an
// item would need sorted-tree non-membership proofs and is not supported.

using Salt = std::array<uint8_t, 16>;
using Nonce = std::array<uint8_t, 16>;

struct InventoryCommitment {
  Digest root{};
  uint64_t leaf_count = 0;
  std::array<uint8_t, 32> owner{};
};

struct ExposureProof {
  std::string item;
  Salt salt{};
  MerkleProof merkle_proof;
  Nonce nonce{};
  Digest binding{};  // SHA-256(root || item || salt || nonce)
};

// Leaf digest for one inventory entry: SHA-256(salt || item bytes).
Digest exposure_leaf(const Salt& salt, std::string_view item);

// Commits to the inventory. Throws SaltCountMismatch, DuplicateItem, or
// EmptyInput (via merkle_root) for an empty inventory.
InventoryCommitment commit(const std::vector<std::string>& inventory,
                           const std::vector<Salt>& salts, const std::array<uint8_t, 32>& owner);

// Fresh verifier nonce, deterministic in the seed.
Nonce challenge(uint64_t rng_seed);

// Opens the leaf for `item`. Throws ItemAbsent when the prover does not hold
// the item; that refusal is the soundness lever.
ExposureProof prove_exposure(const std::vector<std::string>& inventory,
                             const std::vector<Salt>& salts, const std::string& item,
                             const InventoryCommitment& commitment, const Nonce& nonce);

// True iff the binding recomputes under the *presented* nonce and the Merkle
// path opens the salted leaf against commitment.root.
bool verify_exposure(const InventoryCommitment& commitment, const std::string& item,
                     const ExposureProof& proof, const Nonce& nonce);

// Length-prefixed binary form: item, salt, nonce, leaf index, path entries,
// binding. Stable across platforms (integers little-endian).
Bytes serialize_proof(const ExposureProof& proof);
ExposureProof parse_proof(ByteSpan bytes);  // throws ParseError

}  // namespace legion

#endif  // LEGION_EXPOSURE_HPP_
