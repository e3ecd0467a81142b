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

#include "legion/merkle.hpp"

#include "legion/errors.hpp"
#include "legion/sha256.hpp"

namespace legion {
namespace {

constexpr uint8_t kLeafTag = 0x00;
constexpr uint8_t kInternalTag = 0x01;

}  // namespace

Digest merkle_leaf_node(const Digest& leaf) {
  return Sha256().update(ByteSpan(&kLeafTag, 1)).update(ByteSpan(leaf.data(), 32)).finalize();
}

Digest merkle_internal_node(const Digest& left, const Digest& right) {
  return Sha256()
      .update(ByteSpan(&kInternalTag, 1))
      .update(ByteSpan(left.data(), 32))
      .update(ByteSpan(right.data(), 32))
      .finalize();
}

Digest merkle_root(std::span<const Digest> leaves) {
  if (leaves.empty()) throw EmptyInput("merkle_root: no leaves");
  std::vector<Digest> level;
  level.reserve(leaves.size());
  for (const Digest& l : leaves) level.push_back(merkle_leaf_node(l));
  while (level.size() > 1) {
    std::vector<Digest> next;
    next.reserve((level.size() + 1) / 2);
    for (size_t i = 0; i + 1 < level.size(); i += 2)
      next.push_back(merkle_internal_node(level[i], level[i + 1]));
    if (level.size() % 2 == 1) next.push_back(level.back());  // lone node carried up unchanged
    level = std::move(next);
  }
  return level[0];
}

MerkleProof prove_inclusion(std::span<const Digest> leaves, uint64_t index) {
  if (index >= leaves.size()) throw IndexOutOfRange("prove_inclusion: index past leaf count");
  MerkleProof proof;
  proof.leaf_index = index;

  std::vector<Digest> level;
  level.reserve(leaves.size());
  for (const Digest& l : leaves) level.push_back(merkle_leaf_node(l));
  size_t pos = index;
  while (level.size() > 1) {
    std::vector<Digest> next;
    next.reserve((level.size() + 1) / 2);
    for (size_t i = 0; i + 1 < level.size(); i += 2) {
      if (i == (pos & ~size_t(1))) {
        bool lhs = (pos % 2 == 1);
        proof.path.push_back({lhs ? level[i] : level[i + 1], lhs});
      }
      next.push_back(merkle_internal_node(level[i], level[i + 1]));
    }
    if (level.size() % 2 == 1) next.push_back(level.back());
    // A lone promoted node keeps its identity and gains no path element.
    pos = (pos == level.size() - 1 && level.size() % 2 == 1) ? next.size() - 1 : pos / 2;
    level = std::move(next);
  }
  proof.root = level[0];
  return proof;
}

bool verify_inclusion(const MerkleProof& proof, const Digest& leaf) {
  Digest cur = merkle_leaf_node(leaf);
  for (const ProofStep& step : proof.path) {
    cur = step.sibling_on_left ? merkle_internal_node(step.sibling, cur)
                               : merkle_internal_node(cur, step.sibling);
  }
  return cur == proof.root;
}

}  // namespace legion
