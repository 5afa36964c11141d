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

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hdeploy/lexer.hpp"
#include "hdeploy/pattern_db.hpp"
#include "hdeploy/placement_planner.hpp"

namespace hdeploy::testing {

std::filesystem::path data_dir();
std::filesystem::path seed_patterns_path();
std::filesystem::path sample_inventory_path();
std::filesystem::path app_path(const std::string& name);
std::filesystem::path golden_dir();

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "hdeploy");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);

/// The twelve token classes used by randomized detector tests.
inline constexpr std::size_t kAlphabetSize = 12;

/// Random source text over the twelve-class alphabet: identifiers drawn
/// from a small pool, integer literals, two keywords and eight punctuators.
/// Tokens are space separated with occasional newlines.
std::string random_class_source(std::mt19937_64& rng, std::size_t length);

/// Source text of length `length` that splices random slices of `donors`
/// into random filler, so long common runs actually occur.
std::string spliced_source(std::mt19937_64& rng, std::size_t length, const std::vector<std::string>& donors);

/// Re-emits `source` with every identifier replaced through a random
/// injective renaming and every literal replaced by a random literal of a
/// random kind. Line structure is preserved; comments and directives drop.
std::string random_rename(std::mt19937_64& rng, const std::string& source);

// Snippets for a random pattern set. Some are cut from, or extend, earlier
// ones so that overlapping candidates and ranking ties are common.
std::vector<std::string> related_snippets(std::mt19937_64& rng, std::size_t count, std::size_t max_len);

/// Space-joins tokens, keeping each token on its original line.
std::string render_tokens(const std::vector<Token>& tokens);

/// Builds a validated pattern with an empty kernel template.
CodePattern plain_pattern(const std::string& id, const std::string& snippet,
                          DeviceTarget device = DeviceTarget::GPU);

ServerSpec make_server(const std::string& id, ServerKind kind, std::vector<ProvisioningMode> modes,
                       std::uint32_t slots, double cost, std::vector<std::string> logic = {});

}  // namespace hdeploy::testing
