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

//
// File-backed store of offloadable code patterns. Each pattern carries a
// C-subset reference snippet, the device it offloads to, and an
// OpenCL-style kernel template whose ${Pk} placeholders name the k-th
// distinct identifier of the snippet (1-based, order of first appearance).
//
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hdeploy/error.hpp"
#include "hdeploy/lexer.hpp"

namespace hdeploy {

/// Shared with DetectorConfig: a pattern shorter than this can never match
/// under default settings, so the DB refuses it.
inline constexpr std::size_t kDefaultMinMatchTokens = 20;

enum class DeviceTarget { GPU, FPGA };

std::string_view to_string(DeviceTarget d);
std::optional<DeviceTarget> parse_device_target(std::string_view s);

struct CodePattern {
  std::string id;
  std::string name;
  DeviceTarget device_target = DeviceTarget::GPU;
  std::string reference_snippet;
  std::string kernel_template;
  std::optional<std::string> logic_id;
  std::optional<std::string> notes;

  bool operator==(const CodePattern&) const = default;
};

class PatternDbError : public Error {
 public:
  enum class Kind {
    SchemaError,
    DuplicateId,
    SnippetLexError,
    SnippetTooShort,
    PlaceholderOutOfRange,
    MissingLogicId,
    UnexpectedLogicId,
  };

  PatternDbError(Kind kind, std::string pattern_id, const std::string& detail);

  Kind kind() const noexcept { return kind_; }
  const std::string& pattern_id() const noexcept { return pattern_id_; }

 private:
  Kind kind_;
  std::string pattern_id_;
};

std::string_view to_string(PatternDbError::Kind k);

struct PlaceholderSite {
  std::size_t offset = 0;  // position of '$'
  std::size_t length = 0;  // whole "${Pk}" text
  std::size_t index = 0;   // k
};

struct PlaceholderScan {
  std::vector<PlaceholderSite> sites;
  /// Offset of the first "${" that does not open a well-formed ${Pk}.
  std::optional<std::size_t> malformed_at;
};

PlaceholderScan scan_placeholders(std::string_view kernel_template);

/// Identifier lexemes in order of first appearance; slot k is element k-1.
std::vector<std::string> distinct_identifiers(const std::vector<Token>& tokens);

/// Returns the first violated CodePattern invariant, or nullopt when valid.
std::optional<PatternDbError> validate_pattern(const CodePattern& p,
                                               std::size_t min_pattern_tokens = kDefaultMinMatchTokens);

/// Immutable after construction; safe to share read-only.
class PatternDB {
 public:
  PatternDB() = default;

  /// Validates every pattern and computes fingerprints. Throws PatternDbError.
  static PatternDB build(std::vector<CodePattern> patterns,
                         std::size_t min_pattern_tokens = kDefaultMinMatchTokens);

  const std::vector<CodePattern>& patterns() const noexcept { return patterns_; }
  std::size_t size() const noexcept { return patterns_.size(); }

  const CodePattern* find(std::string_view id) const;
  const NormalizedSequence& fingerprint(std::string_view id) const;
  const std::vector<Token>& snippet_tokens(std::string_view id) const;

  /// Every logic_id named by an FPGA pattern.
  std::set<std::string> logic_ids() const;

  bool operator==(const PatternDB& other) const {
    return patterns_ == other.patterns_ && fingerprints_ == other.fingerprints_;
  }

 private:
  std::vector<CodePattern> patterns_;
  std::map<std::string, NormalizedSequence, std::less<>> fingerprints_;
  std::map<std::string, std::vector<Token>, std::less<>> snippet_tokens_;
};

PatternDB parse_pattern_db(std::string_view json_text,
                           std::size_t min_pattern_tokens = kDefaultMinMatchTokens);
PatternDB load_pattern_db(const std::filesystem::path& path,
                          std::size_t min_pattern_tokens = kDefaultMinMatchTokens);
std::string render_pattern_db(const PatternDB& db);

}  // namespace hdeploy
