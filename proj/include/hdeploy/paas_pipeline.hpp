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
// The PaaS orchestrator. deploy() runs the whole flow for one application:
// analyze the source, match it against the pattern DB, emit kernel
// artifacts, plan placement, provision the stack, write the kernels, and
// report servers and cost back to the user. The user then approves (billing
// starts), rejects (the stack is deleted), or reconfigures FPGA logic.
//
// State lives in a workspace directory:
//   deployments/<id>.json   one canonical record per deployment
//   kernels/<id>/*.cl       emitted kernels plus manifest.json
//   simstate.json           the simulated IaaS controller
// A workspace is held under an exclusive lock for the lifetime of a Paas.
//
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hdeploy/clone_detector.hpp"
#include "hdeploy/error.hpp"
#include "hdeploy/iaas_sim.hpp"
#include "hdeploy/offload_extractor.hpp"
#include "hdeploy/pattern_db.hpp"
#include "hdeploy/placement_planner.hpp"

namespace hdeploy {

enum class DeploymentStatus { Analyzed, Provisioned, Approved, Rejected, Failed };

std::string_view to_string(DeploymentStatus s);
std::optional<DeploymentStatus> parse_deployment_status(std::string_view s);

/// ANALYZED->PROVISIONED, ANALYZED->FAILED, PROVISIONED->{APPROVED, REJECTED}.
bool is_legal_transition(DeploymentStatus from, DeploymentStatus to);

struct DeployConfig {
  DetectorConfig detector;
  ProvisioningMode host_mode = ProvisioningMode::Container;
};

struct ServerUsage {
  std::string resource_name;
  std::string role;  // "host" or the offloaded pattern id
  std::string server_id;
  std::string server_kind;
  std::string provisioning_mode;
  bool needs_fpga_configuration = false;
  std::optional<std::string> logic_id;         // requested
  std::optional<std::string> active_logic_id;  // live, from the simulator

  bool operator==(const ServerUsage&) const = default;
};

struct MatchSummary {
  std::string pattern_id;
  LineRange lines;
  double similarity = 0.0;
  bool operator==(const MatchSummary&) const = default;
};

struct DeploymentReport {
  std::string deployment_id;
  DeploymentStatus status = DeploymentStatus::Analyzed;
  bool billing_started = false;
  std::vector<ServerUsage> servers;
  CostEstimate cost;
  std::vector<MatchSummary> matches;
  std::vector<std::string> kernels;  // workspace-relative paths
  std::vector<std::string> warnings;
  std::vector<std::string> notes;
  std::optional<std::string> failure_reason;

  bool operator==(const DeploymentReport&) const = default;
};

Json report_to_json(const DeploymentReport& r);

struct DeploymentRecord {
  std::string deployment_id;
  std::string source_name;
  std::string source_digest;
  std::vector<CloneMatch> matches;
  std::vector<KernelArtifact> artifacts;
  std::vector<PlacementDecision> decisions;
  std::optional<HostPlacement> host;
  std::optional<OrchestrationTemplate> templ;
  std::optional<StackId> stack_id;
  CostEstimate cost;
  DeploymentStatus status = DeploymentStatus::Analyzed;
  bool billing_started = false;
  std::set<std::string> logic_ids;  // reconfiguration targets offered by the DB
  std::optional<std::string> failure_reason;
  DeploymentReport report;

  bool operator==(const DeploymentRecord&) const = default;
};

Json record_to_json(const DeploymentRecord& r);
DeploymentRecord record_from_json(const Json& j);

/// Report as a pure function of the record and the live simulator state.
DeploymentReport make_report(const DeploymentRecord& record, const SimState& sim);

struct DeploymentSummary {
  std::string deployment_id;
  std::string source_name;
  DeploymentStatus status = DeploymentStatus::Analyzed;
  bool billing_started = false;
  std::size_t match_count = 0;
  Cost total_hourly;
};

class PipelineError : public Error {
 public:
  enum class Kind { WrongState, UnknownDeployment, InventoryMismatch, WorkspaceLocked, CorruptWorkspace };

  PipelineError(Kind kind, const std::string& detail);
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(PipelineError::Kind k);

/// Raw source handed to the pipeline in memory.
struct SourceUnit {
  std::string name;
  std::string text;
};

std::string sha256_digest(std::string_view data);  // "sha256:<hex>"

class Paas {
 public:
  /// Creates the workspace if needed and takes its lock. Throws
  /// PipelineError(WorkspaceLocked) when another holder exists.
  explicit Paas(std::filesystem::path workspace);
  ~Paas();
  Paas(const Paas&) = delete;
  Paas& operator=(const Paas&) = delete;

  DeploymentRecord deploy(const std::filesystem::path& source, const std::filesystem::path& pattern_db,
                          const std::filesystem::path& inventory, const DeployConfig& cfg);
  DeploymentRecord deploy(const SourceUnit& source, const PatternDB& db, const Inventory& inventory,
                          const DeployConfig& cfg);

  DeploymentRecord approve(const std::string& deployment_id);
  DeploymentRecord reject(const std::string& deployment_id);
  DeploymentRecord reconfigure(const std::string& deployment_id, const std::string& resource_name,
                               const std::string& logic_id);

  std::vector<DeploymentSummary> list_deployments() const;
  const DeploymentRecord& get_record(const std::string& deployment_id) const;
  DeploymentReport get_report(const std::string& deployment_id) const;

  const SimState& sim() const noexcept { return sim_; }
  const std::filesystem::path& root() const noexcept { return root_; }

  /// Record/simulator consistency; throws InvariantViolation.
  void check_invariants() const;

 private:
  DeploymentRecord& record(const std::string& deployment_id);
  void ensure_inventory(const Inventory& inventory);
  void persist(const DeploymentRecord& r);
  void persist_sim();

  std::filesystem::path root_;
  int lock_fd_ = -1;
  SimState sim_;
  bool sim_initialized_ = false;
  std::map<std::string, DeploymentRecord> records_;
};

}  // namespace hdeploy
