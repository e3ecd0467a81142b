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

#include "legion/exposure.hpp"

#include <algorithm>
#include <set>

#include "legion/errors.hpp"
#include "legion/rng.hpp"
#include "legion/sha256.hpp"

namespace legion {
namespace {

Digest binding_digest(const Digest& root, std::string_view item, const Salt& salt,
                      const Nonce& nonce) {
  return Sha256()
      .update(ByteSpan(root.data(), root.size()))
      .update(as_bytes(item))
      .update(ByteSpan(salt.data(), salt.size()))
      .update(ByteSpan(nonce.data(), nonce.size()))
      .finalize();
}

}  // namespace

Digest exposure_leaf(const Salt& salt, std::string_view item) {
  return Sha256().update(ByteSpan(salt.data(), salt.size())).update(as_bytes(item)).finalize();
}

InventoryCommitment commit(const std::vector<std::string>& inventory,
                           const std::vector<Salt>& salts,
                           const std::array<uint8_t, 32>& owner) {
  if (inventory.size() != salts.size())
    throw SaltCountMismatch("commit: one salt per inventory item required");
  std::set<std::string_view> seen;
  for (const auto& item : inventory)
    if (!seen.insert(item).second) throw DuplicateItem("commit: duplicate item: " + item);

  std::vector<Digest> leaves;
  leaves.reserve(inventory.size());
  for (size_t i = 0; i < inventory.size(); ++i)
    leaves.push_back(exposure_leaf(salts[i], inventory[i]));

  InventoryCommitment c;
  c.root = merkle_root(leaves);
  c.leaf_count = leaves.size();
  c.owner = owner;
  return c;
}

Nonce challenge(uint64_t rng_seed) { return Rng(rng_seed).derive("challenge").nonce16(); }

ExposureProof prove_exposure(const std::vector<std::string>& inventory,
                             const std::vector<Salt>& salts, const std::string& item,
                             const InventoryCommitment& commitment, const Nonce& nonce) {
  if (inventory.size() != salts.size())
    throw SaltCountMismatch("prove_exposure: one salt per inventory item required");
  auto it = std::find(inventory.begin(), inventory.end(), item);
  if (it == inventory.end()) throw ItemAbsent("prove_exposure: item not held: " + item);
  size_t index = static_cast<size_t>(it - inventory.begin());

  std::vector<Digest> leaves;
  leaves.reserve(inventory.size());
  for (size_t i = 0; i < inventory.size(); ++i)
    leaves.push_back(exposure_leaf(salts[i], inventory[i]));

  ExposureProof proof;
  proof.item = item;
  proof.salt = salts[index];
  proof.merkle_proof = prove_inclusion(leaves, index);
  proof.nonce = nonce;
  proof.binding = binding_digest(commitment.root, item, salts[index], nonce);
  return proof;
}

bool verify_exposure(const InventoryCommitment& commitment, const std::string& item,
                     const ExposureProof& proof, const Nonce& nonce) {
  if (proof.item != item) return false;
  if (binding_digest(commitment.root, item, proof.salt, nonce) != proof.binding) return false;
  MerkleProof mp = proof.merkle_proof;
  mp.root = commitment.root;  // the commitment, not the prover, names the root
  return verify_inclusion(mp, exposure_leaf(proof.salt, item));
}

Bytes serialize_proof(const ExposureProof& proof) {
  Bytes out;
  put_field(out, as_bytes(proof.item));
  out.insert(out.end(), proof.salt.begin(), proof.salt.end());
  out.insert(out.end(), proof.nonce.begin(), proof.nonce.end());
  put_u64(out, proof.merkle_proof.leaf_index);
  put_u32(out, static_cast<uint32_t>(proof.merkle_proof.path.size()));
  for (const ProofStep& step : proof.merkle_proof.path) {
    out.push_back(step.sibling_on_left ? 1 : 0);
    out.insert(out.end(), step.sibling.begin(), step.sibling.end());
  }
  out.insert(out.end(), proof.merkle_proof.root.begin(), proof.merkle_proof.root.end());
  out.insert(out.end(), proof.binding.begin(), proof.binding.end());
  return out;
}

ExposureProof parse_proof(ByteSpan bytes) {
  auto need = [&](size_t off, size_t n) {
    if (off + n > bytes.size()) throw ParseError("proof parse: truncated");
  };
  size_t off = 0;
  need(off, 4);
  uint32_t item_len = get_u32(bytes, off);
  off += 4;
  need(off, item_len);
  ExposureProof proof;
  proof.item.assign(reinterpret_cast<const char*>(bytes.data() + off), item_len);
  off += item_len;
  need(off, 16);
  std::copy_n(bytes.begin() + off, 16, proof.salt.begin());
  off += 16;
  need(off, 16);
  std::copy_n(bytes.begin() + off, 16, proof.nonce.begin());
  off += 16;
  need(off, 8);
  proof.merkle_proof.leaf_index = get_u64(bytes, off);
  off += 8;
  need(off, 4);
  uint32_t path_len = get_u32(bytes, off);
  off += 4;
  if (path_len > 64) throw ParseError("proof parse: implausible path length");
  for (uint32_t i = 0; i < path_len; ++i) {
    need(off, 33);
    ProofStep step;
    step.sibling_on_left = bytes[off] != 0;
    std::copy_n(bytes.begin() + off + 1, 32, step.sibling.begin());
    off += 33;
    proof.merkle_proof.path.push_back(step);
  }
  need(off, 32);
  std::copy_n(bytes.begin() + off, 32, proof.merkle_proof.root.begin());
  off += 32;
  need(off, 32);
  std::copy_n(bytes.begin() + off, 32, proof.binding.begin());
  off += 32;
  if (off != bytes.size()) throw ParseError("proof parse: trailing bytes");
  return proof;
}

}  // namespace legion
