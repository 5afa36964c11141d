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
// Device-aware placement. GPU kernels run in containers on GPU servers;
// FPGA kernels get a whole FPGA server through baremetal provisioning,
// preferring a board already configured with the kernel's logic. The host
// application lands on a CPU server. The plan is rendered as one
// orchestration template so every resource is provisioned in a single
// stack, and priced from the inventory's flat hourly rates.
//
#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hdeploy/error.hpp"
#include "hdeploy/json_io.hpp"
#include "hdeploy/offload_extractor.hpp"
#include "hdeploy/pattern_db.hpp"

namespace hdeploy {

enum class ServerKind { CPU, GPU, FPGA };
enum class ProvisioningMode { VM, Container, Baremetal };

std::string_view to_string(ServerKind k);
std::string_view to_string(ProvisioningMode m);
std::optional<ServerKind> parse_server_kind(std::string_view s);
std::optional<ProvisioningMode> parse_provisioning_mode(std::string_view s);

/// Money held as integer millionths so sums are exact.
class Cost {
 public:
  constexpr Cost() = default;
  static Cost from_micros(std::int64_t micros) { return Cost(micros); }
  /// Rounds to the nearest millionth.
  static Cost from_units(double units);

  std::int64_t micros() const noexcept { return micros_; }
  double units() const noexcept { return static_cast<double>(micros_) / 1e6; }

  Cost operator+(Cost o) const noexcept { return Cost(micros_ + o.micros_); }
  Cost& operator+=(Cost o) noexcept {
    micros_ += o.micros_;
    return *this;
  }
  auto operator<=>(const Cost&) const = default;

 private:
  constexpr explicit Cost(std::int64_t m) : micros_(m) {}
  std::int64_t micros_ = 0;
};

struct ServerSpec {
  std::string server_id;
  ServerKind kind = ServerKind::CPU;
  std::vector<ProvisioningMode> provisioning_modes;
  std::vector<std::string> configured_logic_ids;
  std::uint32_t capacity_slots = 1;
  Cost hourly_cost;

  bool supports(ProvisioningMode m) const;
  bool has_logic(std::string_view logic_id) const;
  bool operator==(const ServerSpec&) const = default;
};

class InventoryError : public Error {
 public:
  explicit InventoryError(const std::string& what) : Error(ErrorCategory::Input, what) {}
};

class Inventory {
 public:
  Inventory() = default;

  /// Validates the servers and starts with every slot free.
  static Inventory from_servers(std::vector<ServerSpec> servers);

  const std::vector<ServerSpec>& servers() const noexcept { return servers_; }
  const std::map<std::string, std::uint32_t>& free_slots() const noexcept { return free_slots_; }

  const ServerSpec* find(std::string_view server_id) const;
  std::uint32_t free(std::string_view server_id) const;

  /// Throws InventoryError when the server is unknown or the count exceeds
  /// its capacity.
  void set_free(std::string_view server_id, std::uint32_t slots);

  bool operator==(const Inventory&) const = default;

 private:
  std::vector<ServerSpec> servers_;
  std::map<std::string, std::uint32_t> free_slots_;
};

/// Checks the per-server invariants; throws InventoryError.
void validate_server(const ServerSpec& s);

Inventory parse_inventory(std::string_view json_text);
Inventory load_inventory(const std::filesystem::path& path);
/// Server catalog only; free slots are runtime state.
std::string render_inventory(const Inventory& inv);
Json server_to_json(const ServerSpec& s);
ServerSpec server_from_json(const Json& j);

struct PlacementDecision {
  std::string pattern_id;
  DeviceTarget device = DeviceTarget::GPU;
  std::string server_id;
  ProvisioningMode mode = ProvisioningMode::Container;
  bool needs_fpga_configuration = false;
  std::optional<std::string> logic_id;
  // Template resource name: kernel_<pattern_id>, with _2, _3, ... appended
  // when one pattern is matched more than once.
  std::string resource_name;

  bool operator==(const PlacementDecision&) const = default;
};

struct HostPlacement {
  std::string server_id;
  ProvisioningMode mode = ProvisioningMode::Container;
  bool operator==(const HostPlacement&) const = default;
};

enum class ResourceType { Compute, Router, Storage };
std::string_view to_string(ResourceType t);

struct ComputeProperties {
  std::string server_kind;
  std::string provisioning_mode;
  std::string image;
  std::optional<std::string> server_id;
  std::optional<std::string> fpga_logic_id;
  std::optional<bool> configure_before_run;
  bool operator==(const ComputeProperties&) const = default;
};

struct TemplateResource {
  ResourceType type = ResourceType::Compute;
  std::optional<ComputeProperties> compute;  // set iff type == Compute
  bool operator==(const TemplateResource&) const = default;
};

struct OrchestrationTemplate {
  std::int64_t version = 1;
  std::map<std::string, TemplateResource> resources;

  std::size_t compute_count() const;
  bool operator==(const OrchestrationTemplate&) const = default;
};

inline constexpr std::string_view kHostResource = "host";
inline constexpr std::string_view kRouterResource = "r0";
inline constexpr std::string_view kStorageResource = "s0";

Json template_to_json(const OrchestrationTemplate& t);
OrchestrationTemplate template_from_json(const Json& j);
std::string render_template(const OrchestrationTemplate& t);
OrchestrationTemplate parse_template(std::string_view json_text);

OrchestrationTemplate build_template(const std::vector<PlacementDecision>& decisions,
                                     const HostPlacement& host);
std::string render_template(const std::vector<PlacementDecision>& decisions, const HostPlacement& host);

struct CostLineItem {
  std::string server_id;
  Cost hourly_cost;
  bool operator==(const CostLineItem&) const = default;
};

inline constexpr std::string_view kCurrencyLabel = "USD";

struct CostEstimate {
  std::vector<CostLineItem> line_items;  // sorted by server_id
  Cost total_hourly;
  std::string currency{kCurrencyLabel};
  bool operator==(const CostEstimate&) const = default;
};

class PlanError : public Error {
 public:
  enum class Kind { NoCapacity, IncompleteArtifact, UnknownServer, DuplicateResource };

  PlanError(Kind kind, const std::string& subject);
  Kind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  Kind kind_;
  std::string subject_;
};

/// One line per distinct server used, the host included.
CostEstimate estimate_cost(const std::vector<PlacementDecision>& decisions, const Inventory& inv,
                           const HostPlacement& host);

struct Plan {
  std::vector<PlacementDecision> decisions;
  HostPlacement host;
  OrchestrationTemplate templ;
  CostEstimate cost;
};

/// Places every artifact against the inventory's free slots without
/// mutating it. FPGA: configured board, then blank board, each tier by
/// (hourly_cost, server_id). GPU: container-capable GPU server by
/// (hourly_cost, server_id).
Json decision_to_json(const PlacementDecision& d);
PlacementDecision decision_from_json(const Json& j);
Json host_to_json(const HostPlacement& h);
HostPlacement host_from_json(const Json& j);
Json cost_to_json(const CostEstimate& c);
CostEstimate cost_from_json(const Json& j);

Plan plan(const std::vector<KernelArtifact>& artifacts, const Inventory& inv,
          ProvisioningMode host_mode = ProvisioningMode::Container);

}  // namespace hdeploy
