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

#include "hdeploy/iaas_sim.hpp"

#include <algorithm>
#include <functional>

namespace hdeploy {
namespace {

// Outcome of trying to provision one compute resource.
struct Allocation {
  const ServerSpec* server = nullptr;
  std::optional<std::string> active_logic_id;
  std::string failure;  // non-empty on failure
};

const ServerSpec* cheapest_free(const Inventory& inv, const std::map<std::string, std::uint32_t>& free,
                                ServerKind kind, ProvisioningMode mode,
                                const std::function<bool(const ServerSpec&)>& extra) {
  const ServerSpec* best = nullptr;
  for (const auto& s : inv.servers()) {
    if (s.kind != kind || !s.supports(mode) || free.at(s.server_id) == 0 || !extra(s)) continue;
    if (best == nullptr || std::tie(s.hourly_cost, s.server_id) < std::tie(best->hourly_cost, best->server_id))
      best = &s;
  }
  return best;
}

Allocation allocate(const Inventory& inv, const std::map<std::string, std::uint32_t>& free,
                    const ComputeProperties& p) {
  Allocation out;
  const auto kind = parse_server_kind(p.server_kind);
  if (!kind) {
    out.failure = "UnknownServerKind(" + p.server_kind + ")";
    return out;
  }
  const auto mode = parse_provisioning_mode(p.provisioning_mode);
  if (!mode) {
    out.failure = "UnknownProvisioningMode(" + p.provisioning_mode + ")";
    return out;
  }
  const std::string no_capacity = "NoCapacity(" + p.server_kind + ")";
  const bool configure = p.configure_before_run.value_or(false);
  if (*kind == ServerKind::FPGA && configure && !p.fpga_logic_id) {
    out.failure = "MissingLogicId";
    return out;
  }

  if (p.server_id) {
    const ServerSpec* s = inv.find(*p.server_id);
    if (s == nullptr) {
      out.failure = "UnknownServer(" + *p.server_id + ")";
      return out;
    }
    if (s->kind != *kind || !s->supports(*mode) || free.at(s->server_id) == 0) {
      out.failure = no_capacity;
      return out;
    }
    out.server = s;
  } else if (*kind == ServerKind::FPGA && p.fpga_logic_id) {
    const std::string& logic = *p.fpga_logic_id;
    out.server = cheapest_free(inv, free, *kind, *mode, [&](const ServerSpec& s) { return s.has_logic(logic); });
    if (out.server == nullptr && configure) {
      out.server = cheapest_free(inv, free, *kind, *mode,
                                 [](const ServerSpec& s) { return s.configured_logic_ids.empty(); });
    }
  } else {
    out.server = cheapest_free(inv, free, *kind, *mode, [](const ServerSpec&) { return true; });
  }
  if (out.server == nullptr) {
    out.failure = no_capacity;
    return out;
  }

  if (*kind == ServerKind::FPGA) {
    if (configure) {
      out.active_logic_id = *p.fpga_logic_id;
    } else if (p.fpga_logic_id) {
      if (!out.server->has_logic(*p.fpga_logic_id)) {
        out.server = nullptr;
        out.failure = "LogicNotConfigured(" + *p.fpga_logic_id + ")";
        return out;
      }
      out.active_logic_id = *p.fpga_logic_id;
    } else {
      const auto& ids = out.server->configured_logic_ids;
      out.active_logic_id = ids.empty() ? std::string() : ids.front();
    }
  }
  return out;
}

Json resource_to_json(const ProvisionedResource& r) {
  Json j = Json::object();
  j["resource_id"] = r.resource_id;
  j["resource_name"] = r.resource_name;
  j["type"] = std::string(to_string(r.type));
  if (r.server_id) j["server_id"] = *r.server_id;
  if (r.active_logic_id) j["active_logic_id"] = *r.active_logic_id;
  return j;
}

ProvisionedResource resource_from_json(const Json& j) {
  ObjectReader r(j, "provisioned resource");
  ProvisionedResource res;
  res.resource_id = r.required<std::string>("resource_id");
  res.resource_name = r.required<std::string>("resource_name");
  const auto type = r.required<std::string>("type");
  if (type == "compute") res.type = ResourceType::Compute;
  else if (type == "router") res.type = ResourceType::Router;
  else if (type == "storage") res.type = ResourceType::Storage;
  else r.fail("unknown resource type \"" + type + "\"");
  res.server_id = r.optional<std::string>("server_id");
  res.active_logic_id = r.optional<std::string>("active_logic_id");
  r.finish();
  return res;
}

}  // namespace

std::string_view to_string(StackStatus s) {
  switch (s) {
    case StackStatus::CreateComplete: return "CREATE_COMPLETE";
    case StackStatus::CreateFailed: return "CREATE_FAILED";
    case StackStatus::Deleted: return "DELETED";
  }
  return "?";
}

std::optional<StackStatus> parse_stack_status(std::string_view s) {
  if (s == "CREATE_COMPLETE") return StackStatus::CreateComplete;
  if (s == "CREATE_FAILED") return StackStatus::CreateFailed;
  if (s == "DELETED") return StackStatus::Deleted;
  return std::nullopt;
}

bool is_legal_transition(StackStatus from, StackStatus to) {
  return from == StackStatus::CreateComplete && to == StackStatus::Deleted;
}

std::string_view to_string(SimError::Kind k) {
  switch (k) {
    case SimError::Kind::UnknownStack: return "UnknownStack";
    case SimError::Kind::UnknownResource: return "UnknownResource";
    case SimError::Kind::NotFpgaResource: return "NotFpgaResource";
    case SimError::Kind::UnknownLogicId: return "UnknownLogicId";
    case SimError::Kind::StackNotActive: return "StackNotActive";
  }
  return "?";
}

SimError::SimError(Kind kind, const std::string& detail)
    : Error(kind == Kind::StackNotActive ? ErrorCategory::Lifecycle : ErrorCategory::Input,
            std::string(to_string(kind)) + ": " + detail),
      kind_(kind) {}

const ProvisionedResource* Stack::find(std::string_view resource_name) const {
  auto it = std::find_if(resources.begin(), resources.end(),
                         [&](const ProvisionedResource& r) { return r.resource_name == resource_name; });
  return it == resources.end() ? nullptr : &*it;
}

SimState::SimState(Inventory inventory) : inventory_(std::move(inventory)) {}

StackId SimState::stack_create(const OrchestrationTemplate& templ) {
  Stack stack;
  stack.stack_id = next_id_++;
  stack.templ = templ;

  auto free = inventory_.free_slots();
  std::vector<ProvisionedResource> resources;
  std::string failure;
  for (const auto& [name, res] : templ.resources) {
    ProvisionedResource pr;
    pr.resource_id = "stk" + std::to_string(stack.stack_id) + "." + name;
    pr.resource_name = name;
    pr.type = res.type;
    if (res.type == ResourceType::Compute) {
      if (!res.compute) {
        failure = "MissingProperties(" + name + ")";
        break;
      }
      Allocation a = allocate(inventory_, free, *res.compute);
      if (!a.failure.empty()) {
        failure = a.failure;
        break;
      }
      --free[a.server->server_id];
      pr.server_id = a.server->server_id;
      pr.active_logic_id = std::move(a.active_logic_id);
    }
    resources.push_back(std::move(pr));
  }

  if (failure.empty()) {
    for (const auto& [id, slots] : free) inventory_.set_free(id, slots);
    stack.status = StackStatus::CreateComplete;
    stack.resources = std::move(resources);
  } else {
    stack.status = StackStatus::CreateFailed;
    stack.failure_reason = std::move(failure);
  }
  const StackId id = stack.stack_id;
  stacks_.emplace(id, std::move(stack));
  return id;
}

Stack& SimState::at(StackId id) {
  auto it = stacks_.find(id);
  if (it == stacks_.end()) throw SimError(SimError::Kind::UnknownStack, std::to_string(id));
  return it->second;
}

Stack SimState::stack_get(StackId id) const { return const_cast<SimState*>(this)->at(id); }

void SimState::stack_delete(StackId id) {
  Stack& stack = at(id);
  if (stack.status != StackStatus::CreateComplete) return;
  for (const auto& r : stack.resources) {
    if (r.server_id) inventory_.set_free(*r.server_id, inventory_.free(*r.server_id) + 1);
  }
  stack.status = StackStatus::Deleted;
}

void SimState::reconfigure_fpga(StackId id, std::string_view resource_name, std::string_view logic_id,
                                const std::set<std::string>& known_logic_ids) {
  Stack& stack = at(id);
  if (stack.status != StackStatus::CreateComplete) {
    throw SimError(SimError::Kind::StackNotActive,
                   "stack " + std::to_string(id) + " is " + std::string(to_string(stack.status)));
  }
  auto it = std::find_if(stack.resources.begin(), stack.resources.end(),
                         [&](const ProvisionedResource& r) { return r.resource_name == resource_name; });
  if (it == stack.resources.end()) throw SimError(SimError::Kind::UnknownResource, std::string(resource_name));
  const ServerSpec* server = it->server_id ? inventory_.find(*it->server_id) : nullptr;
  if (it->type != ResourceType::Compute || server == nullptr || server->kind != ServerKind::FPGA)
    throw SimError(SimError::Kind::NotFpgaResource, std::string(resource_name));
  if (!known_logic_ids.contains(std::string(logic_id)))
    throw SimError(SimError::Kind::UnknownLogicId, std::string(logic_id));
  it->active_logic_id = std::string(logic_id);
}

std::uint32_t SimState::held_slots(std::string_view server_id) const {
  std::uint32_t held = 0;
  for (const auto& [_, stack] : stacks_) {
    if (stack.status != StackStatus::CreateComplete) continue;
    for (const auto& r : stack.resources)
      if (r.server_id && *r.server_id == server_id) ++held;
  }
  return held;
}

void SimState::check_invariants() const {
  for (const auto& s : inventory_.servers()) {
    const std::uint32_t free = inventory_.free(s.server_id);
    const std::uint32_t held = held_slots(s.server_id);
    if (free + held != s.capacity_slots) {
      throw InvariantViolation("slot conservation broken on " + s.server_id + ": free " +
                               std::to_string(free) + " + held " + std::to_string(held) + " != capacity " +
                               std::to_string(s.capacity_slots));
    }
  }
  for (const auto& [id, stack] : stacks_) {
    if (id != stack.stack_id || id >= next_id_) throw InvariantViolation("stack id bookkeeping broken");
    if (stack.status == StackStatus::CreateComplete && stack.resources.size() != stack.templ.resources.size())
      throw InvariantViolation("stack " + std::to_string(id) + " is missing resources");
    if (stack.status == StackStatus::CreateFailed && !stack.resources.empty())
      throw InvariantViolation("failed stack " + std::to_string(id) + " holds resources");
    for (const auto& r : stack.resources) {
      const ServerSpec* server = r.server_id ? inventory_.find(*r.server_id) : nullptr;
      if ((r.type == ResourceType::Compute) != (server != nullptr))
        throw InvariantViolation("resource " + r.resource_id + " has a bad server binding");
      const bool fpga = server != nullptr && server->kind == ServerKind::FPGA;
      if (fpga != r.active_logic_id.has_value())
        throw InvariantViolation("resource " + r.resource_id + " has a bad logic binding");
    }
  }
}

Json SimState::to_json() const {
  Json servers = Json::array();
  for (const auto& s : inventory_.servers()) servers.push_back(server_to_json(s));
  Json stacks = Json::array();
  for (const auto& [id, stack] : stacks_) {
    Json resources = Json::array();
    for (const auto& r : stack.resources) resources.push_back(resource_to_json(r));
    Json j = Json::object();
    j["stack_id"] = id;
    j["status"] = std::string(to_string(stack.status));
    j["resources"] = std::move(resources);
    j["template"] = template_to_json(stack.templ);
    if (stack.failure_reason) j["failure_reason"] = *stack.failure_reason;
    stacks.push_back(std::move(j));
  }
  Json j = Json::object();
  j["servers"] = std::move(servers);
  j["free_slots"] = inventory_.free_slots();
  j["stacks"] = std::move(stacks);
  j["next_stack_id"] = next_id_;
  return j;
}

SimState SimState::from_json(const Json& j) {
  ObjectReader r(j, "simulator state");
  const Json& servers = r.required_raw("servers");
  const Json& free = r.required_raw("free_slots");
  const Json& stacks = r.required_raw("stacks");
  const auto next = r.required<std::uint64_t>("next_stack_id");
  r.finish();
  if (!servers.is_array() || !free.is_object() || !stacks.is_array())
    r.fail("servers/stacks must be arrays and free_slots an object");

  std::vector<ServerSpec> specs;
  for (const auto& s : servers) specs.push_back(server_from_json(s));
  SimState state(Inventory::from_servers(std::move(specs)));
  for (const auto& [id, slots] : free.items()) {
    if (!slots.is_number_unsigned()) r.fail("free slot counts must be non-negative integers");
    state.inventory_.set_free(id, slots.get<std::uint32_t>());
  }
  if (free.size() != state.inventory_.servers().size()) r.fail("free_slots must cover every server");

  for (const auto& sj : stacks) {
    ObjectReader sr(sj, "stack");
    Stack st;
    st.stack_id = sr.required<std::uint64_t>("stack_id");
    const auto status = sr.required<std::string>("status");
    const auto parsed = parse_stack_status(status);
    if (!parsed) sr.fail("unknown status \"" + status + "\"");
    st.status = *parsed;
    const Json& res = sr.required_raw("resources");
    if (!res.is_array()) sr.fail("resources must be an array");
    for (const auto& rj : res) st.resources.push_back(resource_from_json(rj));
    st.templ = template_from_json(sr.required_raw("template"));
    st.failure_reason = sr.optional<std::string>("failure_reason");
    sr.finish();
    if (!state.stacks_.emplace(st.stack_id, std::move(st)).second) r.fail("duplicate stack id");
  }
  state.next_id_ = next;
  state.check_invariants();
  return state;
}

}  // namespace hdeploy
