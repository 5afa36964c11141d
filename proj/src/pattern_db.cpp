// Copyright 2026 The hdeploy Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hdeploy/pattern_db.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "hdeploy/json_io.hpp"

namespace hdeploy {
namespace {

std::string describe(PatternDbError::Kind kind, const std::string& id, const std::string& detail) {
  std::string msg = "pattern \"" + id + "\": " + std::string(to_string(kind));
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

CodePattern pattern_from_json(const Json& j, std::size_t index) {
  // Best-effort id for error messages before the id itself is validated.
  std::string label = "#" + std::to_string(index);
  if (j.is_object() && j.contains("id") && j["id"].is_string()) label = j["id"].get<std::string>();
  try {
    ObjectReader r(j, "pattern");
    CodePattern p;
    p.id = r.required<std::string>("id");
    p.name = r.required<std::string>("name");
    const auto device = r.required<std::string>("device_target");
    const auto parsed = parse_device_target(device);
    if (!parsed) r.fail("device_target must be \"GPU\" or \"FPGA\", got \"" + device + "\"");
    p.device_target = *parsed;
    p.reference_snippet = r.required<std::string>("reference_snippet");
    p.kernel_template = r.required<std::string>("kernel_template");
    p.logic_id = r.optional<std::string>("logic_id");
    p.notes = r.optional<std::string>("notes");
    r.finish();
    return p;
  } catch (const SchemaViolation& e) {
    throw PatternDbError(PatternDbError::Kind::SchemaError, label, e.what());
  }
}

Json pattern_to_json(const CodePattern& p) {
  Json j = Json::object();
  j["id"] = p.id;
  j["name"] = p.name;
  j["device_target"] = std::string(to_string(p.device_target));
  j["reference_snippet"] = p.reference_snippet;
  j["kernel_template"] = p.kernel_template;
  if (p.logic_id) j["logic_id"] = *p.logic_id;
  if (p.notes) j["notes"] = *p.notes;
  return j;
}

}  // namespace

PatternDbError::PatternDbError(Kind kind, std::string pattern_id, const std::string& detail)
    : Error(ErrorCategory::Input, describe(kind, pattern_id, detail)),
      kind_(kind),
      pattern_id_(std::move(pattern_id)) {}

std::string_view to_string(PatternDbError::Kind k) {
  switch (k) {
    case PatternDbError::Kind::SchemaError: return "SchemaError";
    case PatternDbError::Kind::DuplicateId: return "DuplicateId";
    case PatternDbError::Kind::SnippetLexError: return "SnippetLexError";
    case PatternDbError::Kind::SnippetTooShort: return "SnippetTooShort";
    case PatternDbError::Kind::PlaceholderOutOfRange: return "PlaceholderOutOfRange";
    case PatternDbError::Kind::MissingLogicId: return "MissingLogicId";
    case PatternDbError::Kind::UnexpectedLogicId: return "UnexpectedLogicId";
  }
  return "?";
}

std::string_view to_string(DeviceTarget d) { return d == DeviceTarget::GPU ? "GPU" : "FPGA"; }

std::optional<DeviceTarget> parse_device_target(std::string_view s) {
  if (s == "GPU") return DeviceTarget::GPU;
  if (s == "FPGA") return DeviceTarget::FPGA;
  return std::nullopt;
}

PlaceholderScan scan_placeholders(std::string_view text) {
  PlaceholderScan scan;
  std::size_t pos = 0;
  while ((pos = text.find("${", pos)) != std::string_view::npos) {
    std::size_t cur = pos + 2;
    std::size_t k = 0;
    bool ok = cur < text.size() && text[cur] == 'P';
    if (ok) {
      ++cur;
      const char* first = text.data() + cur;
      const char* last = text.data() + text.size();
      auto [end, ec] = std::from_chars(first, last, k);
      ok = ec == std::errc() && end != first && end != last && *end == '}';
      cur = static_cast<std::size_t>(end - text.data());
    }
    if (!ok) {
      if (!scan.malformed_at) scan.malformed_at = pos;
      pos += 2;
      continue;
    }
    scan.sites.push_back({pos, cur + 1 - pos, k});
    pos = cur + 1;
  }
  return scan;
}

std::vector<std::string> distinct_identifiers(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (t.kind != TokenKind::Ident) continue;
    if (std::find(out.begin(), out.end(), t.text) == out.end()) out.push_back(t.text);
  }
  return out;
}

std::optional<PatternDbError> validate_pattern(const CodePattern& p, std::size_t min_pattern_tokens) {
  using Kind = PatternDbError::Kind;
  const bool id_ok = !p.id.empty() && p.id.front() != '.' &&
                     std::all_of(p.id.begin(), p.id.end(), [](char c) {
                       return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
                     });
  if (!id_ok) return PatternDbError(Kind::SchemaError, p.id, "id must match [A-Za-z0-9_.-]+");

  if (p.device_target == DeviceTarget::FPGA && (!p.logic_id || p.logic_id->empty()))
    return PatternDbError(Kind::MissingLogicId, p.id, "FPGA patterns need a logic_id");
  if (p.device_target == DeviceTarget::GPU && p.logic_id)
    return PatternDbError(Kind::UnexpectedLogicId, p.id, "GPU patterns take no logic_id");

  std::vector<Token> tokens;
  try {
    tokens = tokenize(p.reference_snippet);
  } catch (const LexError& e) {
    return PatternDbError(Kind::SnippetLexError, p.id, e.what());
  }
  if (tokens.size() < min_pattern_tokens) {
    return PatternDbError(Kind::SnippetTooShort, p.id,
                          std::to_string(tokens.size()) + " tokens, need at least " +
                              std::to_string(min_pattern_tokens));
  }

  const auto scan = scan_placeholders(p.kernel_template);
  if (scan.malformed_at) {
    return PatternDbError(Kind::SchemaError, p.id,
                          "malformed placeholder at offset " + std::to_string(*scan.malformed_at));
  }
  const std::size_t slots = distinct_identifiers(tokens).size();
  for (const auto& site : scan.sites) {
    if (site.index == 0 || site.index > slots) {
      return PatternDbError(Kind::PlaceholderOutOfRange, p.id,
                            "${P" + std::to_string(site.index) + "} but snippet has " +
                                std::to_string(slots) + " distinct identifiers");
    }
  }
  return std::nullopt;
}

PatternDB PatternDB::build(std::vector<CodePattern> patterns, std::size_t min_pattern_tokens) {
  PatternDB db;
  for (auto& p : patterns) {
    if (auto err = validate_pattern(p, min_pattern_tokens)) throw *err;
    if (db.fingerprints_.contains(p.id))
      throw PatternDbError(PatternDbError::Kind::DuplicateId, p.id, "");
    auto tokens = tokenize(p.reference_snippet);
    db.fingerprints_.emplace(p.id, normalize(tokens));
    db.snippet_tokens_.emplace(p.id, std::move(tokens));
  }
  db.patterns_ = std::move(patterns);
  return db;
}

const CodePattern* PatternDB::find(std::string_view id) const {
  auto it = std::find_if(patterns_.begin(), patterns_.end(),
                         [&](const CodePattern& p) { return p.id == id; });
  return it == patterns_.end() ? nullptr : &*it;
}

const NormalizedSequence& PatternDB::fingerprint(std::string_view id) const {
  auto it = fingerprints_.find(id);
  if (it == fingerprints_.end()) throw std::out_of_range("no pattern " + std::string(id));
  return it->second;
}

const std::vector<Token>& PatternDB::snippet_tokens(std::string_view id) const {
  auto it = snippet_tokens_.find(id);
  if (it == snippet_tokens_.end()) throw std::out_of_range("no pattern " + std::string(id));
  return it->second;
}

std::set<std::string> PatternDB::logic_ids() const {
  std::set<std::string> out;
  for (const auto& p : patterns_)
    if (p.logic_id) out.insert(*p.logic_id);
  return out;
}

PatternDB parse_pattern_db(std::string_view json_text, std::size_t min_pattern_tokens) {
  std::vector<CodePattern> patterns;
  try {
    const Json doc = parse_json(json_text, "pattern DB");
    ObjectReader r(doc, "pattern DB");
    if (r.required<std::int64_t>("version") != 1) r.fail("unsupported version");
    const Json& list = r.required_raw("patterns");
    if (!list.is_array()) r.fail("\"patterns\" must be an array");
    r.finish();
    for (std::size_t i = 0; i < list.size(); ++i) patterns.push_back(pattern_from_json(list[i], i));
  } catch (const SchemaViolation& e) {
    throw PatternDbError(PatternDbError::Kind::SchemaError, "", e.what());
  }
  return PatternDB::build(std::move(patterns), min_pattern_tokens);
}

PatternDB load_pattern_db(const std::filesystem::path& path, std::size_t min_pattern_tokens) {
  return parse_pattern_db(read_text_file(path), min_pattern_tokens);
}

std::string render_pattern_db(const PatternDB& db) {
  Json list = Json::array();
  for (const auto& p : db.patterns()) list.push_back(pattern_to_json(p));
  Json doc = Json::object();
  doc["version"] = 1;
  doc["patterns"] = std::move(list);
  return canonical_dump(doc);
}

}  // namespace hdeploy
