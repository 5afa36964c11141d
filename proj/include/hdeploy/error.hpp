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

#include <stdexcept>
#include <string>

namespace hdeploy {

/// Broad failure class. The CLI maps each category to a process exit code.
enum class ErrorCategory {
  Input,         // malformed source, schema violations, unknown ids
  Provisioning,  // capacity exhausted, stack creation failed
  Lifecycle,     // operation not allowed in the current deployment state
  Internal,      // broken invariant inside the toolchain
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace hdeploy
