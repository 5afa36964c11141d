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

#include "hdeploy/placement_planner.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hdeploy {
namespace {

constexpr std::string_view kHostImage = "app-host";
constexpr std::string_view kGpuImage = "opencl-gpu-runtime";
constexpr std::string_view kFpgaImage = "opencl-fpga-runtime";

std::string plan_error_message(PlanError::Kind kind, const std::string& subject) {
  switch (kind) {
    case PlanError::Kind::NoCapacity: return "NoCapacity: no free " + subject + " server";
    case PlanError::Kind::IncompleteArtifact:
      return "IncompleteArtifact: kernel " + subject + " has an incomplete binding";
    case PlanError::Kind::UnknownServer: return "UnknownServer: " + subject;
    case PlanError::Kind::DuplicateResource: return "DuplicateResource: \"" + subject + "\"";
  }
  return subject;
}


// Lowest (hourly_cost, server_id) among servers passing `eligible` that
// still have a free slot in `free`.
template <typename Pred>
const ServerSpec* cheapest(const Inventory& inv, const std::map<std::string, std::uint32_t>& free,
                           Pred eligible) {
  const ServerSpec* best = nullptr;
  for (const auto& s : inv.servers()) {
    if (!eligible(s) || free.at(s.server_id) == 0) continue;
    if (best == nullptr || std::tie(s.hourly_cost, s.server_id) < std::tie(best->hourly_cost, best->server_id))
      best = &s;
  }
  return best;
}

Json compute_properties_to_json(const ComputeProperties& p) {
  Json j = Json::object();
  j["server_kind"] = p.server_kind;
  j["provisioning_mode"] = p.provisioning_mode;
  j["image"] = p.image;
  if (p.server_id) j["server_id"] = *p.server_id;
  if (p.fpga_logic_id) j["fpga_logic_id"] = *p.fpga_logic_id;
  if (p.configure_before_run) j["configure_before_run"] = *p.configure_before_run;
  return j;
}

}  // namespace

std::string_view to_string(ServerKind k) {
  switch (k) {
    case ServerKind::CPU: return "CPU";
    case ServerKind::GPU: return "GPU";
    case ServerKind::FPGA: return "FPGA";
  }
  return "?";
}

std::string_view to_string(ProvisioningMode m) {
  switch (m) {
    case ProvisioningMode::VM: return "vm";
    case ProvisioningMode::Container: return "container";
    case ProvisioningMode::Baremetal: return "baremetal";
  }
  return "?";
}

std::string_view to_string(ResourceType t) {
  switch (t) {
    case ResourceType::Compute: return "compute";
    case ResourceType::Router: return "router";
    case ResourceType::Storage: return "storage";
  }
  return "?";
}

std::optional<ServerKind> parse_server_kind(std::string_view s) {
  if (s == "CPU") return ServerKind::CPU;
  if (s == "GPU") return ServerKind::GPU;
  if (s == "FPGA") return ServerKind::FPGA;
  return std::nullopt;
}

std::optional<ProvisioningMode> parse_provisioning_mode(std::string_view s) {
  if (s == "vm") return ProvisioningMode::VM;
  if (s == "container") return ProvisioningMode::Container;
  if (s == "baremetal") return ProvisioningMode::Baremetal;
  return std::nullopt;
}

Cost Cost::from_units(double units) { return Cost(std::llround(units * 1e6)); }

bool ServerSpec::supports(ProvisioningMode m) const {
  return std::find(provisioning_modes.begin(), provisioning_modes.end(), m) != provisioning_modes.end();
}

bool ServerSpec::has_logic(std::string_view logic_id) const {
  return std::find(configured_logic_ids.begin(), configured_logic_ids.end(), logic_id) !=
         configured_logic_ids.end();
}

void validate_server(const ServerSpec& s) {
  const std::string who = "server \"" + s.server_id + "\": ";
  if (s.server_id.empty()) throw InventoryError("server_id must be non-empty");
  if (s.provisioning_modes.empty()) throw InventoryError(who + "no provisioning modes");
  std::set<ProvisioningMode> modes(s.provisioning_modes.begin(), s.provisioning_modes.end());
  if (modes.size() != s.provisioning_modes.size()) throw InventoryError(who + "duplicate provisioning mode");
  if (s.capacity_slots == 0) throw InventoryError(who + "capacity_slots must be positive");
  if (s.hourly_cost < Cost{}) throw InventoryError(who + "hourly_cost must be non-negative");
  if (s.kind == ServerKind::FPGA && !s.supports(ProvisioningMode::Baremetal))
    throw InventoryError(who + "FPGA servers must support baremetal provisioning");
  if (s.kind != ServerKind::FPGA && !s.configured_logic_ids.empty())
    throw InventoryError(who + "only FPGA servers carry configured_logic_ids");
  if (modes.size() == 1 && s.supports(ProvisioningMode::Baremetal) && s.capacity_slots != 1)
    throw InventoryError(who + "baremetal-only servers have exactly one slot");
}

Inventory Inventory::from_servers(std::vector<ServerSpec> servers) {
  Inventory inv;
  for (const auto& s : servers) {
    validate_server(s);
    if (!inv.free_slots_.emplace(s.server_id, s.capacity_slots).second)
      throw InventoryError("duplicate server_id \"" + s.server_id + "\"");
  }
  inv.servers_ = std::move(servers);
  return inv;
}

const ServerSpec* Inventory::find(std::string_view server_id) const {
  auto it = std::find_if(servers_.begin(), servers_.end(),
                         [&](const ServerSpec& s) { return s.server_id == server_id; });
  return it == servers_.end() ? nullptr : &*it;
}

std::uint32_t Inventory::free(std::string_view server_id) const {
  auto it = free_slots_.find(std::string(server_id));
  if (it == free_slots_.end()) throw InventoryError("unknown server \"" + std::string(server_id) + "\"");
  return it->second;
}

void Inventory::set_free(std::string_view server_id, std::uint32_t slots) {
  const ServerSpec* s = find(server_id);
  if (s == nullptr) throw InventoryError("unknown server \"" + std::string(server_id) + "\"");
  if (slots > s->capacity_slots)
    throw InventoryError("server \"" + s->server_id + "\": free slots exceed capacity");
  free_slots_[s->server_id] = slots;
}

Json server_to_json(const ServerSpec& s) {
  Json modes = Json::array();
  for (auto m : s.provisioning_modes) modes.push_back(std::string(to_string(m)));
  Json j = Json::object();
  j["server_id"] = s.server_id;
  j["kind"] = std::string(to_string(s.kind));
  j["provisioning_modes"] = std::move(modes);
  j["configured_logic_ids"] = s.configured_logic_ids;
  j["capacity_slots"] = s.capacity_slots;
  j["hourly_cost"] = s.hourly_cost.units();
  return j;
}

ServerSpec server_from_json(const Json& j) {
  ObjectReader r(j, "server");
  ServerSpec s;
  s.server_id = r.required<std::string>("server_id");
  const auto kind = r.required<std::string>("kind");
  const auto parsed_kind = parse_server_kind(kind);
  if (!parsed_kind) r.fail("unknown server kind \"" + kind + "\"");
  s.kind = *parsed_kind;
  for (const auto& m : r.required<std::vector<std::string>>("provisioning_modes")) {
    const auto mode = parse_provisioning_mode(m);
    if (!mode) r.fail("unknown provisioning mode \"" + m + "\"");
    s.provisioning_modes.push_back(*mode);
  }
  s.configured_logic_ids =
      r.optional<std::vector<std::string>>("configured_logic_ids").value_or(std::vector<std::string>{});
  const auto slots = r.required<std::int64_t>("capacity_slots");
  if (slots <= 0 || slots > UINT32_MAX) r.fail("capacity_slots must be a positive integer");
  s.capacity_slots = static_cast<std::uint32_t>(slots);
  const double cost = r.required<double>("hourly_cost");
  if (!(cost >= 0.0) || !std::isfinite(cost)) r.fail("hourly_cost must be a non-negative number");
  s.hourly_cost = Cost::from_units(cost);
  r.finish();
  return s;
}

Inventory parse_inventory(std::string_view json_text) {
  const Json doc = parse_json(json_text, "inventory");
  ObjectReader r(doc, "inventory");
  const Json& list = r.required_raw("servers");
  if (!list.is_array()) r.fail("\"servers\" must be an array");
  r.finish();
  std::vector<ServerSpec> servers;
  for (const auto& s : list) servers.push_back(server_from_json(s));
  return Inventory::from_servers(std::move(servers));
}

Inventory load_inventory(const std::filesystem::path& path) {
  return parse_inventory(read_text_file(path));
}

std::string render_inventory(const Inventory& inv) {
  Json list = Json::array();
  for (const auto& s : inv.servers()) list.push_back(server_to_json(s));
  return canonical_dump(Json{{"servers", std::move(list)}});
}

std::size_t OrchestrationTemplate::compute_count() const {
  return static_cast<std::size_t>(std::count_if(resources.begin(), resources.end(), [](const auto& kv) {
    return kv.second.type == ResourceType::Compute;
  }));
}

Json template_to_json(const OrchestrationTemplate& t) {
  Json resources = Json::object();
  for (const auto& [name, res] : t.resources) {
    Json props = res.compute ? compute_properties_to_json(*res.compute) : Json::object();
    resources[name] = Json{{"type", std::string(to_string(res.type))}, {"properties", std::move(props)}};
  }
  Json j = Json::object();
  j["version"] = t.version;
  j["resources"] = std::move(resources);
  return j;
}

OrchestrationTemplate template_from_json(const Json& j) {
  ObjectReader r(j, "template");
  OrchestrationTemplate t;
  t.version = r.required<std::int64_t>("version");
  if (t.version != 1) r.fail("unsupported template version");
  const Json& resources = r.required_raw("resources");
  if (!resources.is_object()) r.fail("\"resources\" must be an object");
  r.finish();
  for (const auto& [name, body] : resources.items()) {
    ObjectReader rr(body, "resource \"" + name + "\"");
    TemplateResource res;
    const auto type = rr.required<std::string>("type");
    const Json& props = rr.required_raw("properties");
    rr.finish();
    if (type == "compute") {
      res.type = ResourceType::Compute;
      ObjectReader pr(props, "resource \"" + name + "\" properties");
      ComputeProperties cp;
      cp.server_kind = pr.required<std::string>("server_kind");
      cp.provisioning_mode = pr.required<std::string>("provisioning_mode");
      cp.image = pr.required<std::string>("image");
      cp.server_id = pr.optional<std::string>("server_id");
      cp.fpga_logic_id = pr.optional<std::string>("fpga_logic_id");
      cp.configure_before_run = pr.optional<bool>("configure_before_run");
      pr.finish();
      res.compute = std::move(cp);
    } else if (type == "router" || type == "storage") {
      res.type = type == "router" ? ResourceType::Router : ResourceType::Storage;
      if (!props.is_object() || !props.empty()) rr.fail(type + " properties must be an empty object");
    } else {
      rr.fail("unknown resource type \"" + type + "\"");
    }
    t.resources.emplace(name, std::move(res));
  }
  return t;
}

std::string render_template(const OrchestrationTemplate& t) { return canonical_dump(template_to_json(t)); }

OrchestrationTemplate parse_template(std::string_view json_text) {
  return template_from_json(parse_json(json_text, "template"));
}

OrchestrationTemplate build_template(const std::vector<PlacementDecision>& decisions,
                                     const HostPlacement& host) {
  OrchestrationTemplate t;
  ComputeProperties host_props;
  host_props.server_kind = std::string(to_string(ServerKind::CPU));
  host_props.provisioning_mode = std::string(to_string(host.mode));
  host_props.image = std::string(kHostImage);
  host_props.server_id = host.server_id;
  t.resources.emplace(std::string(kHostResource), TemplateResource{ResourceType::Compute, host_props});
  t.resources.emplace(std::string(kRouterResource), TemplateResource{ResourceType::Router, std::nullopt});
  t.resources.emplace(std::string(kStorageResource), TemplateResource{ResourceType::Storage, std::nullopt});

  for (const auto& d : decisions) {
    ComputeProperties p;
    const bool fpga = d.device == DeviceTarget::FPGA;
    p.server_kind = std::string(to_string(fpga ? ServerKind::FPGA : ServerKind::GPU));
    p.provisioning_mode = std::string(to_string(d.mode));
    p.image = std::string(fpga ? kFpgaImage : kGpuImage);
    p.server_id = d.server_id;
    if (fpga) {
      p.fpga_logic_id = d.logic_id;
      if (d.needs_fpga_configuration) p.configure_before_run = true;
    }
    if (d.resource_name.empty() || t.resources.contains(d.resource_name))
      throw PlanError(PlanError::Kind::DuplicateResource, d.resource_name);
    t.resources.emplace(d.resource_name, TemplateResource{ResourceType::Compute, std::move(p)});
  }
  return t;
}

std::string render_template(const std::vector<PlacementDecision>& decisions, const HostPlacement& host) {
  return render_template(build_template(decisions, host));
}

PlanError::PlanError(Kind kind, const std::string& subject)
    : Error(kind == Kind::NoCapacity ? ErrorCategory::Provisioning : ErrorCategory::Input,
            plan_error_message(kind, subject)),
      kind_(kind),
      subject_(subject) {}

CostEstimate estimate_cost(const std::vector<PlacementDecision>& decisions, const Inventory& inv,
                           const HostPlacement& host) {
  std::set<std::string> used{host.server_id};
  for (const auto& d : decisions) used.insert(d.server_id);
  CostEstimate est;
  for (const auto& id : used) {
    const ServerSpec* s = inv.find(id);
    if (s == nullptr) throw PlanError(PlanError::Kind::UnknownServer, id);
    est.line_items.push_back({id, s->hourly_cost});
    est.total_hourly += s->hourly_cost;
  }
  return est;
}

namespace {

ProvisioningMode mode_field(ObjectReader& r, const std::string& key) {
  const auto text = r.required<std::string>(key);
  const auto mode = parse_provisioning_mode(text);
  if (!mode) r.fail("unknown provisioning mode \"" + text + "\"");
  return *mode;
}

}  // namespace

Json decision_to_json(const PlacementDecision& d) {
  Json j = Json::object();
  j["pattern_id"] = d.pattern_id;
  j["device"] = std::string(to_string(d.device));
  j["server_id"] = d.server_id;
  j["provisioning_mode"] = std::string(to_string(d.mode));
  j["needs_fpga_configuration"] = d.needs_fpga_configuration;
  j["resource_name"] = d.resource_name;
  if (d.logic_id) j["logic_id"] = *d.logic_id;
  return j;
}

PlacementDecision decision_from_json(const Json& j) {
  ObjectReader r(j, "placement decision");
  PlacementDecision d;
  d.pattern_id = r.required<std::string>("pattern_id");
  const auto device = parse_device_target(r.required<std::string>("device"));
  if (!device) r.fail("bad device");
  d.device = *device;
  d.server_id = r.required<std::string>("server_id");
  d.mode = mode_field(r, "provisioning_mode");
  d.needs_fpga_configuration = r.required<bool>("needs_fpga_configuration");
  d.resource_name = r.required<std::string>("resource_name");
  d.logic_id = r.optional<std::string>("logic_id");
  r.finish();
  return d;
}

Json host_to_json(const HostPlacement& h) {
  return Json{{"server_id", h.server_id}, {"provisioning_mode", std::string(to_string(h.mode))}};
}

HostPlacement host_from_json(const Json& j) {
  ObjectReader r(j, "host placement");
  HostPlacement h;
  h.server_id = r.required<std::string>("server_id");
  h.mode = mode_field(r, "provisioning_mode");
  r.finish();
  return h;
}

Json cost_to_json(const CostEstimate& c) {
  Json items = Json::array();
  for (const auto& li : c.line_items)
    items.push_back(Json{{"server_id", li.server_id}, {"hourly_cost", li.hourly_cost.units()}});
  Json j = Json::object();
  j["line_items"] = std::move(items);
  j["total_hourly"] = c.total_hourly.units();
  j["currency"] = c.currency;
  return j;
}

CostEstimate cost_from_json(const Json& j) {
  ObjectReader r(j, "cost estimate");
  CostEstimate c;
  const Json& items = r.required_raw("line_items");
  if (!items.is_array()) r.fail("line_items must be an array");
  for (const auto& ij : items) {
    ObjectReader ir(ij, "cost line item");
    CostLineItem li;
    li.server_id = ir.required<std::string>("server_id");
    li.hourly_cost = Cost::from_units(ir.required<double>("hourly_cost"));
    ir.finish();
    c.line_items.push_back(std::move(li));
  }
  c.total_hourly = Cost::from_units(r.required<double>("total_hourly"));
  c.currency = r.required<std::string>("currency");
  r.finish();
  return c;
}

Plan plan(const std::vector<KernelArtifact>& artifacts, const Inventory& inv, ProvisioningMode host_mode) {
  for (const auto& a : artifacts) {
    if (!a.binding_complete) throw PlanError(PlanError::Kind::IncompleteArtifact, a.pattern_id);
  }
  auto free = inv.free_slots();
  Plan out;

  const ServerSpec* host = cheapest(inv, free, [&](const ServerSpec& s) {
    return s.kind == ServerKind::CPU && s.supports(host_mode);
  });
  if (host == nullptr)
    throw PlanError(PlanError::Kind::NoCapacity, std::string(to_string(ServerKind::CPU)) + " (" +
                                                     std::string(to_string(host_mode)) + ")");
  --free[host->server_id];
  out.host = {host->server_id, host_mode};

  std::map<std::string, std::size_t> seen;
  for (const auto& a : artifacts) {
    PlacementDecision d;
    d.pattern_id = a.pattern_id;
    const std::size_t nth = ++seen[a.pattern_id];
    d.resource_name = "kernel_" + a.pattern_id + (nth > 1 ? "_" + std::to_string(nth) : "");
    d.device = a.device_target;
    const ServerSpec* chosen = nullptr;
    if (a.device_target == DeviceTarget::GPU) {
      chosen = cheapest(inv, free, [](const ServerSpec& s) {
        return s.kind == ServerKind::GPU && s.supports(ProvisioningMode::Container);
      });
      d.mode = ProvisioningMode::Container;
    } else {
      const std::string logic = a.logic_id.value_or("");
      auto fpga = [](const ServerSpec& s) {
        return s.kind == ServerKind::FPGA && s.supports(ProvisioningMode::Baremetal);
      };
      chosen = cheapest(inv, free, [&](const ServerSpec& s) { return fpga(s) && s.has_logic(logic); });
      if (chosen == nullptr) {
        chosen = cheapest(inv, free,
                          [&](const ServerSpec& s) { return fpga(s) && s.configured_logic_ids.empty(); });
      }
      d.mode = ProvisioningMode::Baremetal;
      d.logic_id = a.logic_id;
      if (chosen != nullptr) d.needs_fpga_configuration = !chosen->has_logic(logic);
    }
    if (chosen == nullptr) {
      const ServerKind kind = a.device_target == DeviceTarget::GPU ? ServerKind::GPU : ServerKind::FPGA;
      throw PlanError(PlanError::Kind::NoCapacity, std::string(to_string(kind)));
    }
    --free[chosen->server_id];
    d.server_id = chosen->server_id;
    out.decisions.push_back(std::move(d));
  }

  out.templ = build_template(out.decisions, out.host);
  out.cost = estimate_cost(out.decisions, inv, out.host);
  return out;
}

}  // namespace hdeploy
