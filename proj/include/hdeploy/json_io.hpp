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
// Canonical JSON helpers shared by every file format in the toolchain.
// Canonical form is nlohmann's compact dump: object keys sorted bytewise,
// no insignificant whitespace, shortest round-trip numbers.
//
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "hdeploy/error.hpp"

namespace hdeploy {

using Json = nlohmann::json;

class SchemaViolation : public Error {
 public:
  explicit SchemaViolation(const std::string& what) : Error(ErrorCategory::Input, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::Input, what) {}
};

std::string canonical_dump(const Json& j);

/// Parses text; syntax errors become SchemaViolation.
Json parse_json(std::string_view text, std::string_view what);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Field-by-field reader over one JSON object that rejects unknown keys.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string context);

  template <typename T>
  T required(const std::string& key) {
    const Json* v = lookup(key);
    if (v == nullptr) fail("missing field \"" + key + "\"");
    return convert<T>(*v, key);
  }

  template <typename T>
  std::optional<T> optional(const std::string& key) {
    const Json* v = lookup(key);
    if (v == nullptr) return std::nullopt;
    return convert<T>(*v, key);
  }

  const Json& required_raw(const std::string& key);

  /// Throws if the object carries any key that was never looked up.
  void finish() const;

  [[noreturn]] void fail(const std::string& msg) const;

 private:
  const Json* lookup(const std::string& key);

  template <typename T>
  T convert(const Json& v, const std::string& key) const {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail("field \"" + key + "\" must be a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail("field \"" + key + "\" must be a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) fail("field \"" + key + "\" must be a number");
      return v.get<double>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail("field \"" + key + "\" must be an integer");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      if (!v.is_array()) fail("field \"" + key + "\" must be an array of strings");
      std::vector<std::string> out;
      for (const auto& e : v) {
        if (!e.is_string()) fail("field \"" + key + "\" must be an array of strings");
        out.push_back(e.get<std::string>());
      }
      return out;
    } else {
      static_assert(sizeof(T) == 0, "unsupported field type");
    }
  }

  const Json& obj_;
  std::string context_;
  std::set<std::string> seen_;
};

}  // namespace hdeploy
