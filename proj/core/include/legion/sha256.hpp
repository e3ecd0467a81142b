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

#ifndef LEGION_SHA256_HPP_
#define LEGION_SHA256_HPP_

#include <cstdint>

#include "legion/bytes.hpp"

namespace legion {

// Incremental FIPS 180-4 SHA-256. Self-contained so the artifact has no
// crypto-library dependency; unit tests pin the FIPS and RFC 4231 vectors.
class Sha256 {
 public:
  Sha256();
  Sha256& update(ByteSpan data);
  Sha256& update(std::string_view s) { return update(as_bytes(s)); }
  Digest finalize();

 private:
  void process_block(const uint8_t* block);

  uint32_t state_[8];
  uint8_t buffer_[64];
  size_t buffered_;
  uint64_t total_bytes_;
};

Digest sha256(ByteSpan data);
inline Digest sha256(std::string_view s) { return sha256(as_bytes(s)); }

// HMAC-SHA-256 (RFC 2104). Used for pseudonymization and mask derivation.
Digest hmac_sha256(ByteSpan key, ByteSpan message);
inline Digest hmac_sha256(ByteSpan key, std::string_view msg) {
  return hmac_sha256(key, as_bytes(msg));
}

}  // namespace legion

#endif  // LEGION_SHA256_HPP_
