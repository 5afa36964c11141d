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
// Token-based clone detection against the pattern DB. For each pattern the
// detector finds the longest contiguous run of normalized tokens shared
// with the user's sequence and reports it when the run is long enough and
// covers enough of the pattern. Overlapping candidates from different
// patterns are resolved so that emitted regions are disjoint.
//
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hdeploy/error.hpp"
#include "hdeploy/json_io.hpp"
#include "hdeploy/lexer.hpp"
#include "hdeploy/pattern_db.hpp"

namespace hdeploy {

struct DetectorConfig {
  std::size_t min_match_tokens = kDefaultMinMatchTokens;
  double similarity_threshold = 0.8;

  /// Throws ConfigError unless min_match_tokens >= 1 and threshold in (0, 1].
  void validate() const;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Input, what) {}
};

/// Half-open [start, end) over a token sequence.
struct TokenRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - start; }
  bool intersects(const TokenRange& o) const noexcept { return start < o.end && o.start < end; }
  bool operator==(const TokenRange&) const = default;
};

/// Inclusive source line span.
struct LineRange {
  std::uint32_t first = 0;
  std::uint32_t last = 0;
  bool operator==(const LineRange&) const = default;
};

struct CloneMatch {
  std::string pattern_id;
  TokenRange source_tokens;
  LineRange source_lines;
  std::size_t pattern_start = 0;  // where the run begins in the fingerprint
  std::size_t match_length = 0;
  double similarity = 0.0;  // match_length / fingerprint length

  bool operator==(const CloneMatch&) const = default;
};

struct CommonRun {
  std::size_t length = 0;
  std::size_t a_start = 0;
  std::size_t b_start = 0;
  bool operator==(const CommonRun&) const = default;
};

/// Longest contiguous token run shared by a and b. Ties go to the smallest
/// a_start, then the smallest b_start; {0, 0, 0} when nothing is shared.
/// Linear in |a| + |b| via a suffix automaton over b.
CommonRun longest_common_run(const NormalizedSequence& a, const NormalizedSequence& b);

/// Priority used when two candidates overlap: higher similarity, then
/// longer run, then smaller pattern id.
bool outranks(const CloneMatch& lhs, const CloneMatch& rhs);

/// Candidates are accepted greedily in outranks() order, skipping any that
/// intersect an accepted region. Result is sorted by source start.
std::vector<CloneMatch> resolve_overlaps(std::vector<CloneMatch> candidates);

Json match_to_json(const CloneMatch& m);
CloneMatch match_from_json(const Json& j);

std::vector<CloneMatch> detect(const NormalizedSequence& user_seq, const PatternDB& db,
                               const DetectorConfig& cfg);

}  // namespace hdeploy
