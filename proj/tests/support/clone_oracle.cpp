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

#include "clone_oracle.hpp"

namespace hdeploy::testing {

CommonRun oracle_longest_common_run(const NormalizedSequence& a, const NormalizedSequence& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  CommonRun best;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = a.tokens[i - 1] == b.tokens[j - 1] ? prev[j - 1] + 1 : 0;
      if (cur[j] == 0) continue;
      const std::size_t len = cur[j];
      const std::size_t as = i - len, bs = j - len;
      const bool better = len > best.length ||
                          (len == best.length && (as < best.a_start || (as == best.a_start && bs < best.b_start)));
      if (better) best = {len, as, bs};
    }
    std::swap(prev, cur);
  }
  return best;
}

std::vector<CloneMatch> oracle_detect(const NormalizedSequence& user_seq, const PatternDB& db,
                                      const DetectorConfig& cfg) {
  std::vector<CloneMatch> pool;
  for (const auto& p : db.patterns()) {
    const auto& fp = db.fingerprint(p.id);
    const CommonRun run = oracle_longest_common_run(user_seq, fp);
    if (run.length == 0 || run.length < cfg.min_match_tokens) continue;
    const double sim = static_cast<double>(run.length) / static_cast<double>(fp.size());
    if (sim < cfg.similarity_threshold) continue;
    CloneMatch m;
    m.pattern_id = p.id;
    m.source_tokens = {run.a_start, run.a_start + run.length};
    m.source_lines = {user_seq.lines[run.a_start], user_seq.lines[run.a_start + run.length - 1]};
    m.pattern_start = run.b_start;
    m.match_length = run.length;
    m.similarity = sim;
    pool.push_back(m);
  }

  // Repeatedly take the strongest remaining candidate and discard whatever
  // it overlaps.
  std::vector<CloneMatch> chosen;
  while (!pool.empty()) {
    std::size_t top = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      const auto& c = pool[i];
      const auto& t = pool[top];
      if (c.similarity > t.similarity ||
          (c.similarity == t.similarity &&
           (c.match_length > t.match_length || (c.match_length == t.match_length && c.pattern_id < t.pattern_id))))
        top = i;
    }
    const CloneMatch winner = pool[top];
    std::vector<CloneMatch> rest;
    for (const auto& c : pool) {
      const bool overlap = c.source_tokens.start < winner.source_tokens.end &&
                           winner.source_tokens.start < c.source_tokens.end;
      if (!overlap) rest.push_back(c);
    }
    pool = std::move(rest);
    chosen.push_back(winner);
  }

  // Insertion sort by start.
  for (std::size_t i = 1; i < chosen.size(); ++i) {
    for (std::size_t j = i; j > 0 && chosen[j].source_tokens.start < chosen[j - 1].source_tokens.start; --j)
      std::swap(chosen[j], chosen[j - 1]);
  }
  return chosen;
}

}  // namespace hdeploy::testing
