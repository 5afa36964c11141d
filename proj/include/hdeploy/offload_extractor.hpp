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
// Turns clone matches into OpenCL-style kernel artifacts. Identifier slots
// of the pattern snippet are aligned position by position with the
// identifiers of the matched user region, and the resulting binding fills
// the ${Pk} placeholders of the pattern's kernel template.
//
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdeploy/clone_detector.hpp"
#include "hdeploy/error.hpp"
#include "hdeploy/json_io.hpp"
#include "hdeploy/lexer.hpp"
#include "hdeploy/pattern_db.hpp"

namespace hdeploy {

/// Slot k (1-based) -> user identifier lexeme.
using Binding = std::map<std::size_t, std::string>;

std::string slot_name(std::size_t k);  // "P<k>"

/// One slot seen with two different user lexemes. Positions are indices into
/// the user's raw token list.
struct BindingConflict {
  std::size_t slot = 0;
  std::string first_lexeme;
  std::string second_lexeme;
  std::size_t first_position = 0;
  std::size_t second_position = 0;
  std::uint32_t first_line = 0;
  std::uint32_t second_line = 0;

  bool operator==(const BindingConflict&) const = default;
};

struct BindingResult {
  Binding binding;  // consistent slots only
  std::vector<BindingConflict> conflicts;

  bool consistent() const noexcept { return conflicts.empty(); }
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& what) : Error(ErrorCategory::Internal, what) {}
};

class UnboundPlaceholder : public Error {
 public:
  explicit UnboundPlaceholder(std::size_t slot);
  std::size_t slot() const noexcept { return slot_; }

 private:
  std::size_t slot_;
};

struct KernelArtifact {
  std::string pattern_id;
  DeviceTarget device_target = DeviceTarget::GPU;
  std::string kernel_source;
  std::string file_name;  // <pattern_id>.cl, or <pattern_id>_<n>.cl for the n-th repeat
  Binding binding;
  bool binding_complete = false;
  std::optional<std::string> logic_id;
  LineRange source_lines;
  std::vector<BindingConflict> conflicts;
  std::vector<std::size_t> unbound_slots;  // placeholders with no binding

  bool operator==(const KernelArtifact&) const = default;
};

/// Throws AlignmentError when the matched run is not token-for-token equal
/// to the fingerprint region it claims to match.
BindingResult bind_identifiers(const CloneMatch& match, const std::vector<Token>& user_tokens,
                               const PatternDB& db);

/// Replaces every ${Pk}. Throws UnboundPlaceholder for the first k missing
/// from the binding.
std::string instantiate_kernel(const CodePattern& pattern, const Binding& binding);

/// Replaces only the bound placeholders and leaves the rest verbatim.
std::string substitute_placeholders(const std::string& kernel_template, const Binding& binding);

std::vector<KernelArtifact> extract_all(const std::vector<CloneMatch>& matches,
                                        const std::vector<Token>& user_tokens, const PatternDB& db);

Json artifact_manifest_entry(const KernelArtifact& a);

/// Manifest entry plus the kernel source; inverse of artifact_from_json.
Json artifact_to_json(const KernelArtifact& a);
KernelArtifact artifact_from_json(const Json& j);

/// Writes <dir>/<pattern_id>.cl for each artifact and <dir>/manifest.json.
void write_kernel_artifacts(const std::filesystem::path& dir,
                            const std::vector<KernelArtifact>& artifacts);

}  // namespace hdeploy
