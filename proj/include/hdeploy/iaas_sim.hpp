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
// Deterministic in-process IaaS controller. A stack is created from an
// orchestration template all at once or not at all; deleting it returns
// every slot it held. FPGA boards can be reconfigured while their stack is
// live. State serializes to canonical JSON for persistence and golden
// comparisons.
//
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hdeploy/error.hpp"
#include "hdeploy/json_io.hpp"
#include "hdeploy/placement_planner.hpp"

namespace hdeploy {

using StackId = std::uint64_t;

enum class StackStatus { CreateComplete, CreateFailed, Deleted };

std::string_view to_string(StackStatus s);
std::optional<StackStatus> parse_stack_status(std::string_view s);

/// CREATE_COMPLETE -> DELETED is the only transition; the rest are terminal.
bool is_legal_transition(StackStatus from, StackStatus to);

struct ProvisionedResource {
  std::string resource_id;
  std::string resource_name;
  ResourceType type = ResourceType::Compute;
  std::optional<std::string> server_id;        // compute only
  std::optional<std::string> active_logic_id;  // FPGA compute only; "" is a blank board

  bool operator==(const ProvisionedResource&) const = default;
};

struct Stack {
  StackId stack_id = 0;
  StackStatus status = StackStatus::CreateFailed;
  std::vector<ProvisionedResource> resources;
  OrchestrationTemplate templ;
  std::optional<std::string> failure_reason;

  const ProvisionedResource* find(std::string_view resource_name) const;
  bool operator==(const Stack&) const = default;
};

class SimError : public Error {
 public:
  enum class Kind { UnknownStack, UnknownResource, NotFpgaResource, UnknownLogicId, StackNotActive };

  SimError(Kind kind, const std::string& detail);
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(SimError::Kind k);

class SimState {
 public:
  SimState() = default;
  explicit SimState(Inventory inventory);

  /// Never throws for capacity problems: a stack that cannot be fully
  /// provisioned is recorded as CREATE_FAILED with a reason and consumes
  /// nothing.
  StackId stack_create(const OrchestrationTemplate& templ);

  Stack stack_get(StackId id) const;

  /// Idempotent. Deleting a CREATE_FAILED stack is a no-op.
  void stack_delete(StackId id);

  void reconfigure_fpga(StackId id, std::string_view resource_name, std::string_view logic_id,
                        const std::set<std::string>& known_logic_ids);

  const Inventory& inventory() const noexcept { return inventory_; }
  const std::map<StackId, Stack>& stacks() const noexcept { return stacks_; }
  StackId next_id() const noexcept { return next_id_; }

  /// Slots held on a server by CREATE_COMPLETE stacks.
  std::uint32_t held_slots(std::string_view server_id) const;

  /// Throws InvariantViolation if slot accounting or resource shape is off.
  void check_invariants() const;

  Json to_json() const;
  std::string dump() const { return canonical_dump(to_json()); }
  static SimState from_json(const Json& j);

  bool operator==(const SimState&) const = default;

 private:
  Stack& at(StackId id);

  Inventory inventory_;
  std::map<StackId, Stack> stacks_;
  StackId next_id_ = 1;
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what) : Error(ErrorCategory::Internal, what) {}
};

}  // namespace hdeploy
