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

#include "hdeploy/json_io.hpp"

#include <fstream>
#include <sstream>

namespace hdeploy {

std::string canonical_dump(const Json& j) { return j.dump(); }

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaViolation(std::string(what) + ": invalid JSON: " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("short write to " + path.string());
}

ObjectReader::ObjectReader(const Json& j, std::string context)
    : obj_(j), context_(std::move(context)) {
  if (!obj_.is_object()) fail("expected a JSON object");
}

const Json* ObjectReader::lookup(const std::string& key) {
  seen_.insert(key);
  auto it = obj_.find(key);
  return it == obj_.end() ? nullptr : &*it;
}

const Json& ObjectReader::required_raw(const std::string& key) {
  const Json* v = lookup(key);
  if (v == nullptr) fail("missing field \"" + key + "\"");
  return *v;
}

void ObjectReader::finish() const {
  for (const auto& [key, _] : obj_.items()) {
    if (!seen_.contains(key)) fail("unknown field \"" + key + "\"");
  }
}

void ObjectReader::fail(const std::string& msg) const {
  throw SchemaViolation(context_ + ": " + msg);
}

}  // namespace hdeploy
