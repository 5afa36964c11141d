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

#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace hdeploy::testing {
namespace fs = std::filesystem;

fs::path data_dir() { return fs::path(HDEPLOY_SOURCE_DIR) / "data"; }
fs::path seed_patterns_path() { return data_dir() / "patterns" / "seed_patterns.json"; }
fs::path sample_inventory_path() { return data_dir() / "inventory" / "sample_inventory.json"; }
fs::path app_path(const std::string& name) { return data_dir() / "apps" / name; }
fs::path golden_dir() { return fs::path(HDEPLOY_SOURCE_DIR) / "tests" / "golden"; }

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  path_ = fs::temp_directory_path() /
          (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

const std::vector<std::string> kLexemes = {"for", "if", "=", "+", "*", ";", "(", ")", "[", "]"};

std::string random_token(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, kAlphabetSize - 1);
  const std::size_t c = pick(rng);
  if (c == 0) return "v" + std::to_string(rng() % 6);
  if (c == 1) return std::to_string(rng() % 100);
  return kLexemes[c - 2];
}

void append_token(std::mt19937_64& rng, std::string& out, const std::string& tok) {
  if (!out.empty()) out += (rng() % 9 == 0) ? '\n' : ' ';
  out += tok;
}

}  // namespace

std::string random_class_source(std::mt19937_64& rng, std::size_t length) {
  std::string out;
  for (std::size_t i = 0; i < length; ++i) append_token(rng, out, random_token(rng));
  return out;
}

std::string spliced_source(std::mt19937_64& rng, std::size_t length, const std::vector<std::string>& donors) {
  std::vector<std::vector<Token>> donor_tokens;
  for (const auto& d : donors) donor_tokens.push_back(tokenize(d));
  std::string out;
  std::size_t produced = 0;
  while (produced < length) {
    if (!donor_tokens.empty() && rng() % 3 == 0) {
      const auto& src = donor_tokens[rng() % donor_tokens.size()];
      if (src.empty()) continue;
      const std::size_t start = rng() % src.size();
      const std::size_t take = std::min<std::size_t>({1 + rng() % src.size(), src.size() - start, length - produced});
      for (std::size_t i = 0; i < take; ++i) append_token(rng, out, src[start + i].text);
      produced += take;
    } else {
      append_token(rng, out, random_token(rng));
      ++produced;
    }
  }
  return out;
}

std::string render_tokens(const std::vector<Token>& tokens) {
  std::string out;
  std::uint32_t line = 1;
  for (const auto& t : tokens) {
    while (line < t.line) {
      out += '\n';
      ++line;
    }
    if (!out.empty() && out.back() != '\n') out += ' ';
    out += t.text;
  }
  return out;
}

std::string random_rename(std::mt19937_64& rng, const std::string& source) {
  auto tokens = tokenize(source);
  std::map<std::string, std::string> renaming;
  for (auto& t : tokens) {
    switch (t.kind) {
      case TokenKind::Ident: {
        auto [it, inserted] = renaming.try_emplace(t.text);
        if (inserted) it->second = "r" + std::to_string(rng() % 100000) + "_" + std::to_string(renaming.size());
        t.text = it->second;
        break;
      }
      case TokenKind::IntLit:
      case TokenKind::FloatLit:
      case TokenKind::StringLit:
      case TokenKind::CharLit:
        switch (rng() % 4) {
          case 0: t.text = std::to_string(rng() % 1000); break;
          case 1: t.text = std::to_string(rng() % 1000) + ".5e-3f"; break;
          case 2: t.text = "\"s" + std::to_string(rng() % 1000) + "\""; break;
          default: t.text = "'" + std::string(1, static_cast<char>('a' + rng() % 26)) + "'"; break;
        }
        break;
      default: break;
    }
  }
  return render_tokens(tokens);
}

std::vector<std::string> related_snippets(std::mt19937_64& rng, std::size_t count, std::size_t max_len) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned mode = out.empty() ? 0 : static_cast<unsigned>(rng() % 3);
    if (mode == 0) {
      out.push_back(random_class_source(rng, 1 + rng() % max_len));
      continue;
    }
    const auto base = tokenize(out[rng() % out.size()]);
    if (mode == 1) {
      const std::size_t start = rng() % base.size();
      const std::size_t len = 1 + rng() % (base.size() - start);
      out.push_back(render_tokens({base.begin() + static_cast<long>(start),
                                   base.begin() + static_cast<long>(start + len)}));
    } else {
      const std::size_t room = max_len > base.size() ? max_len - base.size() : 0;
      std::string grown = render_tokens(base);
      if (room > 0) grown += " " + random_class_source(rng, 1 + rng() % room);
      out.push_back(grown);
    }
  }
  return out;
}

CodePattern plain_pattern(const std::string& id, const std::string& snippet, DeviceTarget device) {
  CodePattern p;
  p.id = id;
  p.name = id;
  p.device_target = device;
  p.reference_snippet = snippet;
  if (device == DeviceTarget::FPGA) p.logic_id = id + "_logic";
  return p;
}

ServerSpec make_server(const std::string& id, ServerKind kind, std::vector<ProvisioningMode> modes,
                       std::uint32_t slots, double cost, std::vector<std::string> logic) {
  ServerSpec s;
  s.server_id = id;
  s.kind = kind;
  s.provisioning_modes = std::move(modes);
  s.capacity_slots = slots;
  s.hourly_cost = Cost::from_units(cost);
  s.configured_logic_ids = std::move(logic);
  return s;
}

}  // namespace hdeploy::testing
