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

#ifndef LEGION_MERKLE_HPP_
#define LEGION_MERKLE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "legion/bytes.hpp"

namespace legion {

// Binary hash tree over 32-byte leaf digests with domain separation between
// leaf and internal nodes (prevents second-preimage tree splicing). A lone
// node at an odd level is promoted unchanged, never duplicated.
//
//   leaf node     = SHA-256(0x00 || leaf)
//   internal node = SHA-256(0x01 || left || right)

struct ProofStep {
  Digest sibling{};
  bool sibling_on_left = false;
};

struct MerkleProof {
  uint64_t leaf_index = 0;
  std::vector<ProofStep> path;  // leaf level upward; promoted levels contribute nothing
  Digest root{};
};

Digest merkle_leaf_node(const Digest& leaf);
Digest merkle_internal_node(const Digest& left, const Digest& right);

// Root over the given leaf digests. Throws EmptyInput for an empty list.
Digest merkle_root(std::span<const Digest> leaves);

// Inclusion proof for leaves[index]. Throws IndexOutOfRange.
MerkleProof prove_inclusion(std::span<const Digest> leaves, uint64_t index);

// Pure fold of the path from the tagged leaf; true iff it reproduces
// proof.root. Any altered leaf, path element, or root fails.
bool verify_inclusion(const MerkleProof& proof, const Digest& leaf);

}  // namespace legion

#endif  // LEGION_MERKLE_HPP_
