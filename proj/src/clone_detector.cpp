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

#include "hdeploy/clone_detector.hpp"

#include <algorithm>
#include <map>

namespace hdeploy {
namespace {

using Symbol = int;

// Maps token classes to dense integers for the automaton's transitions.
class Interner {
 public:
  Symbol intern(const NormalizedToken& t) {
    auto [it, inserted] = ids_.try_emplace(t, static_cast<Symbol>(ids_.size()));
    return it->second;
  }

  // -1 for a class never seen while building; it matches nothing.
  Symbol lookup(const NormalizedToken& t) const {
    auto it = ids_.find(t);
    return it == ids_.end() ? -1 : it->second;
  }

 private:
  std::map<NormalizedToken, Symbol> ids_;
};

class SuffixAutomaton {
 public:
  explicit SuffixAutomaton(const std::vector<Symbol>& text) {
    states_.reserve(2 * text.size() + 1);
    states_.push_back({});
    for (std::size_t i = 0; i < text.size(); ++i) extend(text[i], i);
  }

  CommonRun scan(const std::vector<Symbol>& a) const {
    CommonRun best;
    int v = 0;
    std::size_t len = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const Symbol c = a[i];
      while (v != 0 && !states_[v].next.contains(c)) {
        v = states_[v].link;
        len = states_[v].len;
      }
      if (auto it = states_[v].next.find(c); it != states_[v].next.end()) {
        v = it->second;
        ++len;
      } else {
        v = 0;
        len = 0;
      }
      if (len > best.length) {
        best.length = len;
        best.a_start = i + 1 - len;
        best.b_start = states_[v].first_end + 1 - len;
      }
    }
    return best;
  }

 private:
  struct State {
    std::size_t len = 0;
    int link = -1;
    std::size_t first_end = 0;  // end index of the first occurrence
    std::map<Symbol, int> next;
  };

  void extend(Symbol c, std::size_t pos) {
    const int cur = static_cast<int>(states_.size());
    states_.push_back({states_[last_].len + 1, -1, pos, {}});
    int p = last_;
    while (p != -1 && !states_[p].next.contains(c)) {
      states_[p].next[c] = cur;
      p = states_[p].link;
    }
    if (p == -1) {
      states_[cur].link = 0;
    } else {
      const int q = states_[p].next[c];
      if (states_[p].len + 1 == states_[q].len) {
        states_[cur].link = q;
      } else {
        const int clone = static_cast<int>(states_.size());
        State copy = states_[q];
        copy.len = states_[p].len + 1;
        states_.push_back(std::move(copy));
        while (p != -1) {
          auto it = states_[p].next.find(c);
          if (it == states_[p].next.end() || it->second != q) break;
          it->second = clone;
          p = states_[p].link;
        }
        states_[q].link = clone;
        states_[cur].link = clone;
      }
    }
    last_ = cur;
  }

  std::vector<State> states_;
  int last_ = 0;
};

CloneMatch make_match(const std::string& id, const CommonRun& run, std::size_t fp_len,
                      const NormalizedSequence& user) {
  CloneMatch m;
  m.pattern_id = id;
  m.source_tokens = {run.a_start, run.a_start + run.length};
  if (user.lines.size() == user.size()) {
    m.source_lines = {user.lines[run.a_start], user.lines[run.a_start + run.length - 1]};
  }
  m.pattern_start = run.b_start;
  m.match_length = run.length;
  m.similarity = static_cast<double>(run.length) / static_cast<double>(fp_len);
  return m;
}

}  // namespace

void DetectorConfig::validate() const {
  if (min_match_tokens < 1) throw ConfigError("min_match_tokens must be >= 1");
  if (!(similarity_threshold > 0.0 && similarity_threshold <= 1.0))
    throw ConfigError("similarity threshold must lie in (0, 1]");
}

CommonRun longest_common_run(const NormalizedSequence& a, const NormalizedSequence& b) {
  Interner interner;
  std::vector<Symbol> bs;
  bs.reserve(b.size());
  for (const auto& t : b.tokens) bs.push_back(interner.intern(t));
  std::vector<Symbol> as;
  as.reserve(a.size());
  for (const auto& t : a.tokens) as.push_back(interner.lookup(t));
  return SuffixAutomaton(bs).scan(as);
}

bool outranks(const CloneMatch& lhs, const CloneMatch& rhs) {
  if (lhs.similarity != rhs.similarity) return lhs.similarity > rhs.similarity;
  if (lhs.match_length != rhs.match_length) return lhs.match_length > rhs.match_length;
  return lhs.pattern_id < rhs.pattern_id;
}

std::vector<CloneMatch> resolve_overlaps(std::vector<CloneMatch> candidates) {
  std::sort(candidates.begin(), candidates.end(), outranks);
  std::vector<CloneMatch> kept;
  for (auto& c : candidates) {
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](const CloneMatch& k) {
      return k.source_tokens.intersects(c.source_tokens);
    });
    if (!clash) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end(), [](const CloneMatch& x, const CloneMatch& y) {
    return x.source_tokens.start < y.source_tokens.start;
  });
  return kept;
}

std::vector<CloneMatch> detect(const NormalizedSequence& user_seq, const PatternDB& db,
                               const DetectorConfig& cfg) {
  cfg.validate();
  std::vector<CloneMatch> candidates;
  for (const auto& p : db.patterns()) {
    const auto& fp = db.fingerprint(p.id);
    if (fp.empty()) continue;
    const CommonRun run = longest_common_run(user_seq, fp);
    if (run.length == 0 || run.length < cfg.min_match_tokens) continue;
    CloneMatch m = make_match(p.id, run, fp.size(), user_seq);
    if (m.similarity < cfg.similarity_threshold) continue;
    candidates.push_back(std::move(m));
  }
  return resolve_overlaps(std::move(candidates));
}

Json match_to_json(const CloneMatch& m) {
  Json j = Json::object();
  j["pattern_id"] = m.pattern_id;
  j["tokens"] = Json::array({m.source_tokens.start, m.source_tokens.end});
  j["lines"] = Json::array({m.source_lines.first, m.source_lines.last});
  j["pattern_start"] = m.pattern_start;
  j["match_length"] = m.match_length;
  j["similarity"] = m.similarity;
  return j;
}

CloneMatch match_from_json(const Json& j) {
  ObjectReader r(j, "match");
  CloneMatch m;
  m.pattern_id = r.required<std::string>("pattern_id");
  const Json& tokens = r.required_raw("tokens");
  const Json& lines = r.required_raw("lines");
  m.pattern_start = r.required<std::size_t>("pattern_start");
  m.match_length = r.required<std::size_t>("match_length");
  m.similarity = r.required<double>("similarity");
  r.finish();
  try {
    m.source_tokens = {tokens.at(0).get<std::size_t>(), tokens.at(1).get<std::size_t>()};
    m.source_lines = {lines.at(0).get<std::uint32_t>(), lines.at(1).get<std::uint32_t>()};
  } catch (const Json::exception&) {
    r.fail("tokens and lines must be [start, end] integer pairs");
  }
  return m;
}

}  // namespace hdeploy
