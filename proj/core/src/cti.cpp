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

#include "legion/cti.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>

#include "legion/sha256.hpp"

namespace legion {

const char* to_string(CtiKind k) {
  switch (k) {
    case CtiKind::IpIndicator: return "ip-indicator";
    case CtiKind::FileHashIndicator: return "file-hash";
    case CtiKind::MalwareSignature: return "malware-signature";
    case CtiKind::TechniqueId: return "technique";
    case CtiKind::VulnerabilityId: return "vulnerability";
  }
  return "unknown";
}

std::optional<CtiKind> kind_from_string(std::string_view s) {
  if (s == "ip-indicator") return CtiKind::IpIndicator;
  if (s == "file-hash") return CtiKind::FileHashIndicator;
  if (s == "malware-signature") return CtiKind::MalwareSignature;
  if (s == "technique") return CtiKind::TechniqueId;
  if (s == "vulnerability") return CtiKind::VulnerabilityId;
  return std::nullopt;
}

const char* to_string(Sensitivity s) {
  switch (s) {
    case Sensitivity::Public: return "public";
    case Sensitivity::Community: return "community";
    case Sensitivity::Restricted: return "restricted";
    case Sensitivity::Internal: return "internal";
  }
  return "unknown";
}

std::optional<Sensitivity> sensitivity_from_string(std::string_view s) {
  if (s == "public") return Sensitivity::Public;
  if (s == "community") return Sensitivity::Community;
  if (s == "restricted") return Sensitivity::Restricted;
  if (s == "internal") return Sensitivity::Internal;
  return std::nullopt;
}

namespace {

bool all_hex(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
  });
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Strict dotted-quad: four decimal octets 0..255, 1-3 digits each.
bool parse_ipv4(std::string_view s, std::array<int, 4>* octets_out = nullptr) {
  std::array<int, 4> octets{};
  size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    size_t end = (i < 3) ? s.find('.', pos) : s.size();
    if (end == std::string_view::npos) return false;
    std::string_view part = s.substr(pos, end - pos);
    if (part.empty() || part.size() > 3 || !all_digits(part)) return false;
    int v = 0;
    std::from_chars(part.data(), part.data() + part.size(), v);
    if (v > 255) return false;
    octets[i] = v;
    pos = end + 1;
  }
  if (octets_out) *octets_out = octets;
  return true;
}

// "a.b.c.0/24" as produced by GeneralizeIpTo24.
bool is_generalized_ip(std::string_view s) {
  if (!s.ends_with("/24")) return false;
  std::string_view ip = s.substr(0, s.size() - 3);
  std::array<int, 4> o{};
  return parse_ipv4(ip, &o) && o[3] == 0;
}

bool is_pseudonym_form(std::string_view s) {
  return s.starts_with(kPseudonymPrefix) && s.size() == kPseudonymPrefix.size() + 64 &&
         all_hex(s.substr(kPseudonymPrefix.size()));
}

bool is_sanitized_form(std::string_view s) {
  return s == kRedactedValue || is_pseudonym_form(s);
}

bool value_well_formed(CtiKind kind, std::string_view v) {
  if (is_sanitized_form(v)) return true;
  switch (kind) {
    case CtiKind::IpIndicator:
      return parse_ipv4(v) || is_generalized_ip(v);
    case CtiKind::FileHashIndicator:
      return (v.size() == 32 || v.size() == 40 || v.size() == 64) && all_hex(v);
    case CtiKind::MalwareSignature:
      return true;
    case CtiKind::TechniqueId: {
      // MITRE-style "Tnnnn" with optional ".nnn" sub-technique.
      if (v.size() < 5 || v[0] != 'T' || !all_digits(v.substr(1, 4))) return false;
      if (v.size() == 5) return true;
      return v.size() == 9 && v[5] == '.' && all_digits(v.substr(6));
    }
    case CtiKind::VulnerabilityId: {
      if (!v.starts_with("CVE-")) return false;
      size_t dash = v.find('-', 4);
      if (dash == std::string_view::npos) return false;
      return dash - 4 == 4 && all_digits(v.substr(4, 4)) && v.size() - dash - 1 >= 4 &&
             all_digits(v.substr(dash + 1));
    }
  }
  return false;
}

std::string double_to_string(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

const std::vector<std::string>& record_field_names() {
  static const std::vector<std::string> kFields = {
      "confidence", "kind", "observed_at", "record_id", "sensitivity", "source", "value"};
  return kFields;
}

std::vector<std::string> validate(const SanitizationPolicy& policy) {
  std::vector<std::string> out;
  const auto& fields = record_field_names();
  for (const auto& f : fields) {
    if (!policy.field_rules.contains(f)) out.push_back("missing rule for field: " + f);
  }
  for (const auto& [name, _] : policy.field_rules) {
    if (std::find(fields.begin(), fields.end(), name) == fields.end())
      out.push_back("rule for unknown field: " + name);
  }
  if (policy.audience == Audience::Public) {
    auto it = policy.field_rules.find("source");
    if (it != policy.field_rules.end() && it->second == FieldAction::Keep)
      out.push_back("Public audience must not keep source");
  }
  return out;
}

std::vector<std::string> validate(const CtiRecord& record) {
  std::vector<std::string> out;
  if (record.value.empty()) out.push_back("value: empty");
  for (char c : record.value) {
    if (c == '|' || c == '\n' || c == '\r') {
      out.push_back("value: contains reserved character");
      break;
    }
  }
  if (!std::isfinite(record.confidence) || record.confidence < 0.0 || record.confidence > 1.0)
    out.push_back("confidence: out of range");
  if (record.observed_at < 0) out.push_back("observed_at: negative");
  if (!record.value.empty() && !value_well_formed(record.kind, record.value))
    out.push_back("value: malformed for kind");
  return out;
}

Bytes canonical_encode(const CtiRecord& record) {
  if (!validate(record).empty()) throw InvalidRecord("canonical_encode: record fails validate");
  Bytes out;
  // Field order: confidence, kind, observed_at, record_id, sensitivity,
  // source, value (lexicographic by field name).
  Bytes f;
  uint64_t bits;
  static_assert(sizeof(bits) == sizeof(record.confidence));
  std::memcpy(&bits, &record.confidence, 8);
  put_u64(f, bits);
  put_field(out, ByteSpan(f.data(), f.size()));

  uint8_t kind_b = static_cast<uint8_t>(record.kind);
  put_field(out, ByteSpan(&kind_b, 1));

  f.clear();
  put_u64(f, static_cast<uint64_t>(record.observed_at));
  put_field(out, ByteSpan(f.data(), f.size()));

  put_field(out, ByteSpan(record.record_id.data(), record.record_id.size()));

  uint8_t sens_b = static_cast<uint8_t>(record.sensitivity);
  put_field(out, ByteSpan(&sens_b, 1));

  f.clear();
  if (record.source) {
    f.push_back(record.source->is_token ? 0x01 : 0x00);
    if (record.source->is_token) {
      f.insert(f.end(), record.source->token.begin(), record.source->token.end());
    } else {
      f.insert(f.end(), record.source->raw.begin(), record.source->raw.end());
    }
  }
  put_field(out, ByteSpan(f.data(), f.size()));

  put_field(out, as_bytes(record.value));
  return out;
}

std::array<uint8_t, 32> pseudonymize(ByteSpan value, const std::array<uint8_t, 32>& key) {
  return hmac_sha256(ByteSpan(key.data(), key.size()), value);
}

namespace {

std::string apply_value_rule(CtiKind kind, const std::string& value, FieldAction action,
                             const std::array<uint8_t, 32>& key) {
  switch (action) {
    case FieldAction::Keep:
      return value;
    case FieldAction::Redact:
      return std::string(kRedactedValue);
    case FieldAction::Pseudonymize:
      if (is_pseudonym_form(value)) return value;
      return std::string(kPseudonymPrefix) + to_hex(pseudonymize(value, key));
    case FieldAction::GeneralizeIpTo24: {
      std::array<int, 4> o{};
      if (kind == CtiKind::IpIndicator && parse_ipv4(value, &o)) {
        return std::to_string(o[0]) + "." + std::to_string(o[1]) + "." + std::to_string(o[2]) +
               ".0/24";
      }
      return value;  // already generalized or not an address; leave unchanged
    }
  }
  return value;
}

}  // namespace

CtiRecord sanitize(const CtiRecord& record, const SanitizationPolicy& policy) {
  if (auto issues = validate(policy); !issues.empty())
    throw PolicyMismatch("sanitize: " + issues.front());
  if (!validate(record).empty()) throw InvalidRecord("sanitize: record fails validate");

  auto rule = [&](const char* field) { return policy.field_rules.at(field); };

  if (record.sensitivity == Sensitivity::Internal && policy.audience != Audience::IntraOrg) {
    bool source_hidden = rule("source") == FieldAction::Redact ||
                         rule("source") == FieldAction::Pseudonymize;
    bool value_hidden = record.kind != CtiKind::IpIndicator ||
                        rule("value") == FieldAction::Redact ||
                        rule("value") == FieldAction::Pseudonymize;
    if (!source_hidden || !value_hidden)
      throw InternalNotSharable("sanitize: Internal record under non-IntraOrg policy");
  }

  CtiRecord out = record;
  switch (rule("source")) {
    case FieldAction::Keep:
      break;
    case FieldAction::Redact:
      out.source.reset();
      break;
    case FieldAction::Pseudonymize:
      if (out.source && !out.source->is_token)
        out.source = SourceId::from_token(pseudonymize(out.source->raw, policy.pseudonym_key));
      break;
    case FieldAction::GeneralizeIpTo24:
      break;  // not meaningful for source
  }
  out.value = apply_value_rule(record.kind, record.value, rule("value"), policy.pseudonym_key);
  // record_id, kind, sensitivity, confidence, observed_at: structural fields,
  // Keep regardless of rule.
  return out;
}

SanitizationPolicy default_policy(Audience audience, const std::array<uint8_t, 32>& key) {
  SanitizationPolicy p;
  p.audience = audience;
  p.pseudonym_key = key;
  for (const auto& f : record_field_names()) p.field_rules[f] = FieldAction::Keep;
  switch (audience) {
    case Audience::IntraOrg:
      break;
    case Audience::InterOrg:
      p.field_rules["source"] = FieldAction::Pseudonymize;
      p.field_rules["value"] = FieldAction::GeneralizeIpTo24;
      break;
    case Audience::Public:
      p.field_rules["source"] = FieldAction::Redact;
      p.field_rules["value"] = FieldAction::GeneralizeIpTo24;
      break;
  }
  return p;
}

std::string stix_export_line(const CtiRecord& record) {
  if (auto issues = validate(record); !issues.empty())
    throw InvalidRecord("stix export: " + issues.front());
  if (record.source && !record.source->is_token)
    throw ExportUnsanitized("stix export: raw source identity");
  std::string line;
  line += to_string(record.kind);
  line += '|';
  line += record.value;
  line += '|';
  line += to_string(record.sensitivity);
  line += '|';
  line += double_to_string(record.confidence);
  line += '|';
  line += std::to_string(record.observed_at);
  line += '|';
  if (record.source) line += to_hex(ByteSpan(record.source->token.data(), 32));
  return line;
}

std::string stix_export(const std::vector<CtiRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += stix_export_line(r);
    out += '\n';
  }
  return out;
}

CtiRecord stix_import_line(std::string_view line) {
  std::vector<std::string_view> parts;
  size_t pos = 0;
  while (true) {
    size_t bar = line.find('|', pos);
    if (bar == std::string_view::npos) {
      parts.push_back(line.substr(pos));
      break;
    }
    parts.push_back(line.substr(pos, bar - pos));
    pos = bar + 1;
  }
  if (parts.size() != 6) throw ParseError("stix import: expected 6 fields");

  CtiRecord r;
  auto kind = kind_from_string(parts[0]);
  if (!kind) throw ParseError("stix import: unknown kind");
  r.kind = *kind;
  r.value = std::string(parts[1]);
  auto sens = sensitivity_from_string(parts[2]);
  if (!sens) throw ParseError("stix import: unknown sensitivity");
  r.sensitivity = *sens;
  {
    double c = 0;
    auto [p, ec] = std::from_chars(parts[3].data(), parts[3].data() + parts[3].size(), c);
    if (ec != std::errc() || p != parts[3].data() + parts[3].size())
      throw ParseError("stix import: bad confidence");
    r.confidence = c;
  }
  {
    int64_t t = 0;
    auto [p, ec] = std::from_chars(parts[4].data(), parts[4].data() + parts[4].size(), t);
    if (ec != std::errc() || p != parts[4].data() + parts[4].size())
      throw ParseError("stix import: bad observed_at");
    r.observed_at = t;
  }
  if (!parts[5].empty()) {
    if (parts[5].size() != 64 || !all_hex(parts[5]))
      throw ParseError("stix import: bad source token");
    r.source = SourceId::from_token(array_from_hex<32>(parts[5]));
  }
  // record_id is not part of the line format; derive it from the content.
  Digest d = sha256(line);
  std::memcpy(r.record_id.data(), d.data(), r.record_id.size());
  if (auto issues = validate(r); !issues.empty()) throw ParseError("stix import: " + issues.front());
  return r;
}

std::vector<CtiRecord> stix_import(std::string_view text) {
  std::vector<CtiRecord> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line =
        (nl == std::string_view::npos) ? text.substr(pos) : text.substr(pos, nl - pos);
    if (!line.empty()) out.push_back(stix_import_line(line));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

}  // namespace legion
