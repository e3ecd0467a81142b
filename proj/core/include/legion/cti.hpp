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

#ifndef LEGION_CTI_HPP_
#define LEGION_CTI_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "legion/bytes.hpp"
#include "legion/errors.hpp"

namespace legion {

// Indicator categories exchanged by the federation: network indicators, file
// hashes, signatures, adversary technique ids, and vulnerability ids.
enum class CtiKind : uint8_t {
  IpIndicator = 0,
  FileHashIndicator = 1,
  MalwareSignature = 2,
  TechniqueId = 3,
  VulnerabilityId = 4,
};

// Sharing ladder. Internal records never leave their origin node; the
// federation layer enforces that on every outbound path.
enum class Sensitivity : uint8_t {
  Public = 0,
  Community = 1,
  Restricted = 2,
  Internal = 3,
};

// Origin identity: either the raw name known inside the org, or the keyed
// 32-byte pseudonym that replaces it before the record leaves.
struct SourceId {
  bool is_token = false;
  std::string raw;                    // meaningful when !is_token
  std::array<uint8_t, 32> token{};    // meaningful when is_token

  static SourceId raw_name(std::string name) {
    SourceId s;
    s.raw = std::move(name);
    return s;
  }
  static SourceId from_token(const std::array<uint8_t, 32>& t) {
    SourceId s;
    s.is_token = true;
    s.token = t;
    return s;
  }
  bool operator==(const SourceId&) const = default;
};

struct CtiRecord {
  std::array<uint8_t, 16> record_id{};
  CtiKind kind = CtiKind::MalwareSignature;
  std::string value;
  Sensitivity sensitivity = Sensitivity::Community;
  std::optional<SourceId> source;
  double confidence = 1.0;   // in [0, 1]
  int64_t observed_at = 0;   // simulation tick

  bool operator==(const CtiRecord&) const = default;
};

// Marker forms a sanitized value may take, accepted by validate() for every
// kind so sanitized records stay valid.
inline constexpr std::string_view kRedactedValue = "[redacted]";
inline constexpr std::string_view kPseudonymPrefix = "psn:";

enum class FieldAction : uint8_t { Keep = 0, Redact = 1, Pseudonymize = 2, GeneralizeIpTo24 = 3 };

enum class Audience : uint8_t { IntraOrg = 0, InterOrg = 1, Public = 2 };

// Per-audience redaction/pseudonymization rules. Every record field must have
// exactly one rule; a Public policy must not keep the source identity.
struct SanitizationPolicy {
  Audience audience = Audience::IntraOrg;
  std::map<std::string, FieldAction> field_rules;
  std::array<uint8_t, 32> pseudonym_key{};
};

// The known field names, in the lexicographic order canonical_encode uses.
const std::vector<std::string>& record_field_names();

// Text names used by the STIX-lite format and scenario configs.
const char* to_string(CtiKind kind);
const char* to_string(Sensitivity sensitivity);
std::optional<CtiKind> kind_from_string(std::string_view name);
std::optional<Sensitivity> sensitivity_from_string(std::string_view name);

// Structural policy checks: unknown field names, missing rules, Public+Keep
// on source. Empty result means the policy is usable.
std::vector<std::string> validate(const SanitizationPolicy& policy);

// All violations found in the record; empty means valid. Checks value
// non-empty and free of '|' and control characters, confidence in [0,1],
// observed_at >= 0, and the per-kind value format. Sanitized forms
// ("[redacted]", "psn:<64 hex>", and "a.b.c.0/24" for IP indicators) are
// accepted so sanitize() output still validates.
std::vector<std::string> validate(const CtiRecord& record);

// Deterministic byte encoding used for ledger digests: fields in fixed
// lexicographic name order, each length-prefixed, integers little-endian,
// confidence as its IEEE-754 bit pattern. Equal records produce identical
// bytes; any field change produces different bytes.
// Precondition: validate(record) is empty (throws InvalidRecord otherwise).
Bytes canonical_encode(const CtiRecord& record);

// Keyed deterministic pseudonym: HMAC-SHA-256(key, value). Same (value, key)
// always yields the same token, so records remain correlatable within a key.
std::array<uint8_t, 32> pseudonymize(ByteSpan value, const std::array<uint8_t, 32>& key);
inline std::array<uint8_t, 32> pseudonymize(std::string_view value,
                                            const std::array<uint8_t, 32>& key) {
  return pseudonymize(as_bytes(value), key);
}

// Applies the policy's field rules. Idempotent: sanitizing an already
// sanitized record under the same policy is the identity.
//
// Throws PolicyMismatch for structurally invalid policies, InvalidRecord when
// the input fails validate, and InternalNotSharable when an Internal record
// meets a non-IntraOrg policy whose identifying-field rules (source, and
// value for IP indicators) are not Redact/Pseudonymize.
CtiRecord sanitize(const CtiRecord& record, const SanitizationPolicy& policy);

// Built-in per-audience policies used by scenarios: IntraOrg keeps
// everything, InterOrg pseudonymizes the source and generalizes IPs, Public
// redacts the source and generalizes IPs.
SanitizationPolicy default_policy(Audience audience, const std::array<uint8_t, 32>& key);

// STIX-lite line format:
//   kind|value|sensitivity|confidence|observed_at|source_token_hex
// One record per line, UTF-8, LF endings. Only sanitized records (source
// absent or tokenized) can be exported; a raw source throws
// ExportUnsanitized. Import derives record_id from the line digest.
std::string stix_export_line(const CtiRecord& record);
std::string stix_export(const std::vector<CtiRecord>& records);
CtiRecord stix_import_line(std::string_view line);
std::vector<CtiRecord> stix_import(std::string_view text);

}  // namespace legion

#endif  // LEGION_CTI_HPP_
