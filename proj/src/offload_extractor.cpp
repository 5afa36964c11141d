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

#include "hdeploy/offload_extractor.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace hdeploy {

std::string slot_name(std::size_t k) { return "P" + std::to_string(k); }

UnboundPlaceholder::UnboundPlaceholder(std::size_t slot)
    : Error(ErrorCategory::Internal, "unbound placeholder ${" + slot_name(slot) + "}"), slot_(slot) {}

BindingResult bind_identifiers(const CloneMatch& match, const std::vector<Token>& user_tokens,
                               const PatternDB& db) {
  const auto& snippet = db.snippet_tokens(match.pattern_id);
  const auto& fp = db.fingerprint(match.pattern_id);
  const auto user = normalize(user_tokens);

  const std::size_t len = match.match_length;
  if (match.source_tokens.size() != len || match.source_tokens.end > user.size() ||
      match.pattern_start + len > fp.size()) {
    throw AlignmentError("match for " + match.pattern_id + " lies outside its sequences");
  }

  const auto slots = distinct_identifiers(snippet);
  auto slot_of = [&](const std::string& lexeme) {
    return static_cast<std::size_t>(std::find(slots.begin(), slots.end(), lexeme) - slots.begin()) + 1;
  };

  BindingResult result;
  std::map<std::size_t, std::size_t> first_seen;  // slot -> user token index
  std::set<std::size_t> conflicted;
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t u = match.source_tokens.start + i;
    const std::size_t f = match.pattern_start + i;
    if (user.tokens[u] != fp.tokens[f]) {
      throw AlignmentError("match for " + match.pattern_id + " diverges from fingerprint at offset " +
                           std::to_string(i));
    }
    if (!fp.tokens[f].is_param()) continue;

    const std::size_t slot = slot_of(snippet[fp.origin[f]].text);
    const std::size_t user_index = user.origin[u];
    const std::string& lexeme = user_tokens[user_index].text;
    auto [it, inserted] = result.binding.try_emplace(slot, lexeme);
    if (inserted) {
      first_seen[slot] = user_index;
    } else if (it->second != lexeme) {
      const std::size_t first = first_seen[slot];
      result.conflicts.push_back({slot, it->second, lexeme, first, user_index,
                                  user_tokens[first].line, user_tokens[user_index].line});
      conflicted.insert(slot);
    }
  }
  for (std::size_t slot : conflicted) result.binding.erase(slot);
  return result;
}

std::string substitute_placeholders(const std::string& kernel_template, const Binding& binding) {
  const auto scan = scan_placeholders(kernel_template);
  std::string out;
  out.reserve(kernel_template.size());
  std::size_t pos = 0;
  for (const auto& site : scan.sites) {
    out.append(kernel_template, pos, site.offset - pos);
    if (auto it = binding.find(site.index); it != binding.end()) {
      out += it->second;
    } else {
      out.append(kernel_template, site.offset, site.length);
    }
    pos = site.offset + site.length;
  }
  out.append(kernel_template, pos, std::string::npos);
  return out;
}

std::string instantiate_kernel(const CodePattern& pattern, const Binding& binding) {
  for (const auto& site : scan_placeholders(pattern.kernel_template).sites) {
    if (!binding.contains(site.index)) throw UnboundPlaceholder(site.index);
  }
  return substitute_placeholders(pattern.kernel_template, binding);
}

std::vector<KernelArtifact> extract_all(const std::vector<CloneMatch>& matches,
                                        const std::vector<Token>& user_tokens, const PatternDB& db) {
  std::vector<KernelArtifact> out;
  out.reserve(matches.size());
  std::map<std::string, std::size_t> seen;
  for (const auto& m : matches) {
    const CodePattern* pattern = db.find(m.pattern_id);
    if (pattern == nullptr) throw AlignmentError("match names unknown pattern " + m.pattern_id);

    BindingResult bound = bind_identifiers(m, user_tokens, db);
    KernelArtifact a;
    a.pattern_id = pattern->id;
    a.device_target = pattern->device_target;
    a.logic_id = pattern->logic_id;
    a.source_lines = m.source_lines;
    const std::size_t nth = ++seen[a.pattern_id];
    a.file_name = a.pattern_id + (nth > 1 ? "_" + std::to_string(nth) : "") + ".cl";
    a.conflicts = std::move(bound.conflicts);
    a.binding = std::move(bound.binding);

    std::set<std::size_t> conflicted;
    for (const auto& c : a.conflicts) conflicted.insert(c.slot);
    std::set<std::size_t> unbound;  // never reached by the matched run
    for (const auto& site : scan_placeholders(pattern->kernel_template).sites) {
      if (!a.binding.contains(site.index) && !conflicted.contains(site.index)) unbound.insert(site.index);
    }
    a.unbound_slots.assign(unbound.begin(), unbound.end());
    a.binding_complete = a.conflicts.empty() && a.unbound_slots.empty();
    a.kernel_source = a.binding_complete ? instantiate_kernel(*pattern, a.binding)
                                         : substitute_placeholders(pattern->kernel_template, a.binding);
    out.push_back(std::move(a));
  }
  return out;
}

Json artifact_manifest_entry(const KernelArtifact& a) {
  Json binding = Json::object();
  for (const auto& [slot, lexeme] : a.binding) binding[slot_name(slot)] = lexeme;
  Json j = Json::object();
  j["pattern_id"] = a.pattern_id;
  j["device_target"] = std::string(to_string(a.device_target));
  j["file"] = a.file_name;
  j["binding"] = std::move(binding);
  j["binding_complete"] = a.binding_complete;
  j["lines"] = Json::array({a.source_lines.first, a.source_lines.last});
  if (a.logic_id) j["logic_id"] = *a.logic_id;
  if (!a.conflicts.empty()) {
    Json list = Json::array();
    for (const auto& c : a.conflicts) {
      list.push_back({{"slot", slot_name(c.slot)},
                      {"lexemes", Json::array({c.first_lexeme, c.second_lexeme})},
                      {"lines", Json::array({c.first_line, c.second_line})},
                      {"token_positions", Json::array({c.first_position, c.second_position})}});
    }
    j["conflicts"] = std::move(list);
  }
  if (!a.unbound_slots.empty()) {
    Json list = Json::array();
    for (auto s : a.unbound_slots) list.push_back(slot_name(s));
    j["unbound_slots"] = std::move(list);
  }
  return j;
}

Json artifact_to_json(const KernelArtifact& a) {
  Json j = artifact_manifest_entry(a);
  j["kernel_source"] = a.kernel_source;
  return j;
}

namespace {

std::size_t parse_slot_name(const std::string& name, const ObjectReader& r) {
  std::size_t k = 0;
  const char* first = name.data() + 1;
  const char* last = name.data() + name.size();
  if (name.size() < 2 || name[0] != 'P' || std::from_chars(first, last, k).ptr != last || k == 0)
    r.fail("bad slot name \"" + name + "\"");
  return k;
}

template <typename T>
std::pair<T, T> pair_of(const Json& j, const ObjectReader& r, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    r.fail(std::string(what) + " must be a pair of integers");
  return {j[0].get<T>(), j[1].get<T>()};
}

}  // namespace

KernelArtifact artifact_from_json(const Json& j) {
  ObjectReader r(j, "kernel artifact");
  KernelArtifact a;
  a.pattern_id = r.required<std::string>("pattern_id");
  const auto device = parse_device_target(r.required<std::string>("device_target"));
  if (!device) r.fail("bad device_target");
  a.device_target = *device;
  a.file_name = r.required<std::string>("file");
  if (!a.file_name.starts_with(a.pattern_id) || !a.file_name.ends_with(".cl") ||
      a.file_name.find('/') != std::string::npos)
    r.fail("file name does not match pattern id");
  const Json& binding = r.required_raw("binding");
  if (!binding.is_object()) r.fail("binding must be an object");
  for (const auto& [slot, lexeme] : binding.items()) {
    if (!lexeme.is_string()) r.fail("binding values must be strings");
    a.binding.emplace(parse_slot_name(slot, r), lexeme.get<std::string>());
  }
  a.binding_complete = r.required<bool>("binding_complete");
  const auto lines = pair_of<std::uint32_t>(r.required_raw("lines"), r, "lines");
  a.source_lines = {lines.first, lines.second};
  a.logic_id = r.optional<std::string>("logic_id");
  if (j.contains("conflicts")) {
    const Json& list = r.required_raw("conflicts");
    if (!list.is_array()) r.fail("conflicts must be an array");
    for (const auto& cj : list) {
      ObjectReader cr(cj, "binding conflict");
      BindingConflict c;
      c.slot = parse_slot_name(cr.required<std::string>("slot"), cr);
      const auto lexemes = cr.required<std::vector<std::string>>("lexemes");
      if (lexemes.size() != 2) cr.fail("lexemes must hold two entries");
      c.first_lexeme = lexemes[0];
      c.second_lexeme = lexemes[1];
      const auto cl = pair_of<std::uint32_t>(cr.required_raw("lines"), cr, "lines");
      const auto cp = pair_of<std::size_t>(cr.required_raw("token_positions"), cr, "token_positions");
      cr.finish();
      c.first_line = cl.first;
      c.second_line = cl.second;
      c.first_position = cp.first;
      c.second_position = cp.second;
      a.conflicts.push_back(std::move(c));
    }
  }
  for (const auto& slot : r.optional<std::vector<std::string>>("unbound_slots").value_or(std::vector<std::string>{}))
    a.unbound_slots.push_back(parse_slot_name(slot, r));
  a.kernel_source = r.required<std::string>("kernel_source");
  r.finish();
  return a;
}

void write_kernel_artifacts(const std::filesystem::path& dir,
                            const std::vector<KernelArtifact>& artifacts) {
  std::filesystem::create_directories(dir);
  Json kernels = Json::array();
  for (const auto& a : artifacts) {
    write_text_file(dir / a.file_name, a.kernel_source);
    kernels.push_back(artifact_manifest_entry(a));
  }
  write_text_file(dir / "manifest.json", canonical_dump(Json{{"kernels", std::move(kernels)}}));
}

}  // namespace hdeploy
