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

#include "hdeploy/paas_pipeline.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>

namespace hdeploy {
namespace fs = std::filesystem;

namespace {

constexpr const char* kDeploymentsDir = "deployments";
constexpr const char* kKernelsDir = "kernels";
constexpr const char* kSimStateFile = "simstate.json";
constexpr const char* kLockFile = ".lock";

std::string deployment_name(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "dep-%04zu", n);
  return buf;
}

std::string line_span(const LineRange& r) {
  return r.first == r.last ? "line " + std::to_string(r.first)
                           : "lines " + std::to_string(r.first) + "-" + std::to_string(r.last);
}

std::string describe_incomplete(const KernelArtifact& a) {
  std::string msg = "kernel " + a.pattern_id + " (" + line_span(a.source_lines) +
                    ") left on CPU for manual review:";
  for (const auto& c : a.conflicts) {
    msg += " slot " + slot_name(c.slot) + " bound to both \"" + c.first_lexeme + "\" (line " +
           std::to_string(c.first_line) + ") and \"" + c.second_lexeme + "\" (line " +
           std::to_string(c.second_line) + ");";
  }
  if (!a.unbound_slots.empty()) {
    msg += " unbound slots";
    for (auto s : a.unbound_slots) msg += " " + slot_name(s);
    msg += ";";
  }
  msg.pop_back();
  return msg;
}

Json usage_to_json(const ServerUsage& u) {
  Json j = Json::object();
  j["resource_name"] = u.resource_name;
  j["role"] = u.role;
  j["server_id"] = u.server_id;
  j["server_kind"] = u.server_kind;
  j["provisioning_mode"] = u.provisioning_mode;
  j["needs_fpga_configuration"] = u.needs_fpga_configuration;
  if (u.logic_id) j["logic_id"] = *u.logic_id;
  if (u.active_logic_id) j["active_logic_id"] = *u.active_logic_id;
  return j;
}

template <typename T, typename F>
std::vector<T> list_from(ObjectReader& r, const std::string& key, F&& convert) {
  const Json& list = r.required_raw(key);
  if (!list.is_array()) r.fail("\"" + key + "\" must be an array");
  std::vector<T> out;
  for (const auto& e : list) out.push_back(convert(e));
  return out;
}

}  // namespace

std::string_view to_string(DeploymentStatus s) {
  switch (s) {
    case DeploymentStatus::Analyzed: return "ANALYZED";
    case DeploymentStatus::Provisioned: return "PROVISIONED";
    case DeploymentStatus::Approved: return "APPROVED";
    case DeploymentStatus::Rejected: return "REJECTED";
    case DeploymentStatus::Failed: return "FAILED";
  }
  return "?";
}

std::optional<DeploymentStatus> parse_deployment_status(std::string_view s) {
  for (auto st : {DeploymentStatus::Analyzed, DeploymentStatus::Provisioned, DeploymentStatus::Approved,
                  DeploymentStatus::Rejected, DeploymentStatus::Failed}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

bool is_legal_transition(DeploymentStatus from, DeploymentStatus to) {
  using S = DeploymentStatus;
  switch (from) {
    case S::Analyzed: return to == S::Provisioned || to == S::Failed;
    case S::Provisioned: return to == S::Approved || to == S::Rejected;
    default: return false;
  }
}

std::string_view to_string(PipelineError::Kind k) {
  switch (k) {
    case PipelineError::Kind::WrongState: return "WrongState";
    case PipelineError::Kind::UnknownDeployment: return "UnknownDeployment";
    case PipelineError::Kind::InventoryMismatch: return "InventoryMismatch";
    case PipelineError::Kind::WorkspaceLocked: return "WorkspaceLocked";
    case PipelineError::Kind::CorruptWorkspace: return "CorruptWorkspace";
  }
  return "?";
}

PipelineError::PipelineError(Kind kind, const std::string& detail)
    : Error(kind == Kind::WrongState         ? ErrorCategory::Lifecycle
            : kind == Kind::CorruptWorkspace ? ErrorCategory::Internal
                                             : ErrorCategory::Input,
            std::string(to_string(kind)) + ": " + detail),
      kind_(kind) {}

std::string sha256_digest(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCategory::Internal, "sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

Json report_to_json(const DeploymentReport& r) {
  Json servers = Json::array();
  for (const auto& u : r.servers) servers.push_back(usage_to_json(u));
  Json matches = Json::array();
  for (const auto& m : r.matches) {
    matches.push_back(Json{{"pattern_id", m.pattern_id},
                           {"lines", Json::array({m.lines.first, m.lines.last})},
                           {"similarity", m.similarity}});
  }
  Json j = Json::object();
  j["deployment_id"] = r.deployment_id;
  j["status"] = std::string(to_string(r.status));
  j["billing_started"] = r.billing_started;
  j["servers"] = std::move(servers);
  j["cost"] = cost_to_json(r.cost);
  j["matches"] = std::move(matches);
  j["kernels"] = r.kernels;
  j["warnings"] = r.warnings;
  j["notes"] = r.notes;
  if (r.failure_reason) j["failure_reason"] = *r.failure_reason;
  return j;
}

DeploymentReport make_report(const DeploymentRecord& rec, const SimState& sim) {
  DeploymentReport rep;
  rep.deployment_id = rec.deployment_id;
  rep.status = rec.status;
  rep.billing_started = rec.billing_started;
  rep.cost = rec.cost;
  rep.failure_reason = rec.failure_reason;

  const Stack* stack = nullptr;
  if (rec.stack_id) {
    auto it = sim.stacks().find(*rec.stack_id);
    if (it != sim.stacks().end()) stack = &it->second;
  }
  auto active_logic = [&](const std::string& name) -> std::optional<std::string> {
    if (stack == nullptr) return std::nullopt;
    const ProvisionedResource* r = stack->find(name);
    return r == nullptr ? std::nullopt : r->active_logic_id;
  };

  if (rec.host) {
    ServerUsage u;
    u.resource_name = std::string(kHostResource);
    u.role = "host";
    u.server_id = rec.host->server_id;
    u.server_kind = std::string(to_string(ServerKind::CPU));
    u.provisioning_mode = std::string(to_string(rec.host->mode));
    rep.servers.push_back(std::move(u));
  }
  for (const auto& d : rec.decisions) {
    ServerUsage u;
    u.resource_name = d.resource_name;
    u.role = d.pattern_id;
    u.server_id = d.server_id;
    u.server_kind = std::string(to_string(d.device == DeviceTarget::GPU ? ServerKind::GPU : ServerKind::FPGA));
    u.provisioning_mode = std::string(to_string(d.mode));
    u.needs_fpga_configuration = d.needs_fpga_configuration;
    u.logic_id = d.logic_id;
    u.active_logic_id = active_logic(u.resource_name);
    rep.servers.push_back(std::move(u));
    if (d.needs_fpga_configuration) {
      rep.notes.push_back("FPGA server " + d.server_id + " is configured with " + d.logic_id.value_or("?") +
                          " before the application runs");
    }
  }

  for (const auto& m : rec.matches) rep.matches.push_back({m.pattern_id, m.source_lines, m.similarity});
  if (rec.matches.empty()) rep.notes.push_back("no offloadable logic found");

  const bool kernels_written = rec.status == DeploymentStatus::Provisioned ||
                               rec.status == DeploymentStatus::Approved ||
                               rec.status == DeploymentStatus::Rejected;
  for (const auto& a : rec.artifacts) {
    if (kernels_written) {
      rep.kernels.push_back(std::string(kKernelsDir) + "/" + rec.deployment_id + "/" + a.file_name);
    }
    if (!a.binding_complete) rep.warnings.push_back(describe_incomplete(a));
  }
  return rep;
}

Json record_to_json(const DeploymentRecord& r) {
  Json matches = Json::array();
  for (const auto& m : r.matches) matches.push_back(match_to_json(m));
  Json artifacts = Json::array();
  for (const auto& a : r.artifacts) artifacts.push_back(artifact_to_json(a));
  Json decisions = Json::array();
  for (const auto& d : r.decisions) decisions.push_back(decision_to_json(d));

  Json j = Json::object();
  j["deployment_id"] = r.deployment_id;
  j["source_name"] = r.source_name;
  j["source_digest"] = r.source_digest;
  j["matches"] = std::move(matches);
  j["artifacts"] = std::move(artifacts);
  j["decisions"] = std::move(decisions);
  if (r.host) j["host"] = host_to_json(*r.host);
  if (r.templ) j["template"] = template_to_json(*r.templ);
  if (r.stack_id) j["stack_id"] = *r.stack_id;
  j["cost"] = cost_to_json(r.cost);
  j["status"] = std::string(to_string(r.status));
  j["billing_started"] = r.billing_started;
  j["logic_ids"] = r.logic_ids;
  if (r.failure_reason) j["failure_reason"] = *r.failure_reason;
  j["report"] = report_to_json(r.report);
  return j;
}

DeploymentRecord record_from_json(const Json& j) {
  ObjectReader r(j, "deployment record");
  DeploymentRecord rec;
  rec.deployment_id = r.required<std::string>("deployment_id");
  rec.source_name = r.required<std::string>("source_name");
  rec.source_digest = r.required<std::string>("source_digest");
  rec.matches = list_from<CloneMatch>(r, "matches", match_from_json);
  rec.artifacts = list_from<KernelArtifact>(r, "artifacts", artifact_from_json);
  rec.decisions = list_from<PlacementDecision>(r, "decisions", decision_from_json);
  if (j.contains("host")) rec.host = host_from_json(r.required_raw("host"));
  if (j.contains("template")) rec.templ = template_from_json(r.required_raw("template"));
  rec.stack_id = r.optional<StackId>("stack_id");
  rec.cost = cost_from_json(r.required_raw("cost"));
  const auto status = r.required<std::string>("status");
  const auto parsed = parse_deployment_status(status);
  if (!parsed) r.fail("unknown status \"" + status + "\"");
  rec.status = *parsed;
  rec.billing_started = r.required<bool>("billing_started");
  const auto ids = r.required<std::vector<std::string>>("logic_ids");
  rec.logic_ids = {ids.begin(), ids.end()};
  rec.failure_reason = r.optional<std::string>("failure_reason");
  r.required_raw("report");  // rebuilt by the caller from live state
  r.finish();
  return rec;
}

Paas::Paas(fs::path workspace) : root_(std::move(workspace)) {
  fs::create_directories(root_ / kDeploymentsDir);
  fs::create_directories(root_ / kKernelsDir);

  const fs::path lock_path = root_ / kLockFile;
  lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (lock_fd_ < 0) throw IoError("cannot open " + lock_path.string() + ": " + std::strerror(errno));
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw PipelineError(PipelineError::Kind::WorkspaceLocked, root_.string() + " is in use by another process");
  }

  try {
    const fs::path sim_path = root_ / kSimStateFile;
    if (fs::exists(sim_path)) {
      sim_ = SimState::from_json(parse_json(read_text_file(sim_path), "simulator state"));
      sim_initialized_ = true;
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(root_ / kDeploymentsDir)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const Json j = parse_json(read_text_file(f), f.string());
      DeploymentRecord rec = record_from_json(j);
      rec.report = make_report(rec, sim_);
      if (report_to_json(rec.report) != j.at("report"))
        throw PipelineError(PipelineError::Kind::CorruptWorkspace, f.string() + ": stale report");
      records_.emplace(rec.deployment_id, std::move(rec));
    }
    check_invariants();
  } catch (const PipelineError&) {
    ::close(lock_fd_);
    throw;
  } catch (const Error& e) {
    ::close(lock_fd_);
    throw PipelineError(PipelineError::Kind::CorruptWorkspace, e.what());
  }
}

Paas::~Paas() {
  if (lock_fd_ >= 0) ::close(lock_fd_);
}

void Paas::ensure_inventory(const Inventory& inventory) {
  if (!sim_initialized_) {
    sim_ = SimState(inventory);
    sim_initialized_ = true;
    return;
  }
  if (sim_.inventory().servers() != inventory.servers()) {
    throw PipelineError(PipelineError::Kind::InventoryMismatch,
                        "inventory differs from the one this workspace was provisioned with");
  }
}

DeploymentRecord Paas::deploy(const fs::path& source, const fs::path& pattern_db, const fs::path& inventory,
                              const DeployConfig& cfg) {
  SourceUnit unit{source.filename().string(), read_text_file(source)};
  const PatternDB db = load_pattern_db(pattern_db, cfg.detector.min_match_tokens);
  const Inventory inv = load_inventory(inventory);
  return deploy(unit, db, inv, cfg);
}

DeploymentRecord Paas::deploy(const SourceUnit& source, const PatternDB& db, const Inventory& inventory,
                              const DeployConfig& cfg) {
  // Everything that can reject the input happens before provisioning.
  cfg.detector.validate();
  const std::vector<Token> tokens = tokenize(source.text);
  const NormalizedSequence seq = normalize(tokens);
  ensure_inventory(inventory);

  DeploymentRecord rec;
  rec.deployment_id = deployment_name(records_.size() + 1);
  rec.source_name = source.name;
  rec.source_digest = sha256_digest(source.text);
  rec.logic_ids = db.logic_ids();
  rec.matches = detect(seq, db, cfg.detector);
  rec.artifacts = extract_all(rec.matches, tokens, db);
  rec.status = DeploymentStatus::Analyzed;

  std::vector<KernelArtifact> placeable;
  std::copy_if(rec.artifacts.begin(), rec.artifacts.end(), std::back_inserter(placeable),
               [](const KernelArtifact& a) { return a.binding_complete; });

  std::optional<Plan> planned;
  try {
    planned = plan(placeable, sim_.inventory(), cfg.host_mode);
  } catch (const PlanError& e) {
    if (e.kind() != PlanError::Kind::NoCapacity) throw;
    rec.status = DeploymentStatus::Failed;
    rec.failure_reason = e.what();
  }

  if (planned) {
    rec.decisions = planned->decisions;
    rec.host = planned->host;
    rec.templ = planned->templ;
    const StackId id = sim_.stack_create(*rec.templ);
    rec.stack_id = id;
    const Stack stack = sim_.stack_get(id);
    if (stack.status == StackStatus::CreateComplete) {
      rec.status = DeploymentStatus::Provisioned;
      rec.cost = planned->cost;
      write_kernel_artifacts(root_ / kKernelsDir / rec.deployment_id, rec.artifacts);
    } else {
      rec.status = DeploymentStatus::Failed;
      rec.failure_reason = "stack " + std::to_string(id) + " CREATE_FAILED: " + stack.failure_reason.value_or("");
    }
  }

  rec.report = make_report(rec, sim_);
  persist_sim();
  persist(rec);
  auto [it, _] = records_.insert_or_assign(rec.deployment_id, std::move(rec));
  return it->second;
}

DeploymentRecord& Paas::record(const std::string& deployment_id) {
  auto it = records_.find(deployment_id);
  if (it == records_.end()) throw PipelineError(PipelineError::Kind::UnknownDeployment, deployment_id);
  return it->second;
}

const DeploymentRecord& Paas::get_record(const std::string& deployment_id) const {
  return const_cast<Paas*>(this)->record(deployment_id);
}

DeploymentReport Paas::get_report(const std::string& deployment_id) const {
  return get_record(deployment_id).report;
}

DeploymentRecord Paas::approve(const std::string& deployment_id) {
  DeploymentRecord& rec = record(deployment_id);
  if (!is_legal_transition(rec.status, DeploymentStatus::Approved))
    throw PipelineError(PipelineError::Kind::WrongState,
                        "cannot approve " + deployment_id + " in state " + std::string(to_string(rec.status)));
  rec.status = DeploymentStatus::Approved;
  rec.billing_started = true;
  rec.report = make_report(rec, sim_);
  persist(rec);
  return rec;
}

DeploymentRecord Paas::reject(const std::string& deployment_id) {
  DeploymentRecord& rec = record(deployment_id);
  if (!is_legal_transition(rec.status, DeploymentStatus::Rejected))
    throw PipelineError(PipelineError::Kind::WrongState,
                        "cannot reject " + deployment_id + " in state " + std::string(to_string(rec.status)));
  sim_.stack_delete(*rec.stack_id);
  rec.status = DeploymentStatus::Rejected;
  rec.billing_started = false;
  rec.report = make_report(rec, sim_);
  persist_sim();
  persist(rec);
  return rec;
}

DeploymentRecord Paas::reconfigure(const std::string& deployment_id, const std::string& resource_name,
                                   const std::string& logic_id) {
  DeploymentRecord& rec = record(deployment_id);
  if (rec.status != DeploymentStatus::Provisioned && rec.status != DeploymentStatus::Approved)
    throw PipelineError(PipelineError::Kind::WrongState, "cannot reconfigure " + deployment_id + " in state " +
                                                             std::string(to_string(rec.status)));
  sim_.reconfigure_fpga(*rec.stack_id, resource_name, logic_id, rec.logic_ids);
  rec.report = make_report(rec, sim_);
  persist_sim();
  persist(rec);
  return rec;
}

std::vector<DeploymentSummary> Paas::list_deployments() const {
  std::vector<DeploymentSummary> out;
  for (const auto& [id, rec] : records_) {
    out.push_back({id, rec.source_name, rec.status, rec.billing_started, rec.matches.size(),
                   rec.cost.total_hourly});
  }
  return out;
}

void Paas::check_invariants() const {
  sim_.check_invariants();
  for (const auto& [id, rec] : records_) {
    auto fail = [&](const std::string& what) { throw InvariantViolation(id + ": " + what); };
    if (rec.billing_started != (rec.status == DeploymentStatus::Approved)) fail("billing flag out of step");
    const Stack* stack = nullptr;
    if (rec.stack_id) {
      auto it = sim_.stacks().find(*rec.stack_id);
      if (it == sim_.stacks().end()) fail("stack missing from simulator");
      stack = &it->second;
    }
    switch (rec.status) {
      case DeploymentStatus::Provisioned:
      case DeploymentStatus::Approved:
        if (stack == nullptr || stack->status != StackStatus::CreateComplete) fail("stack not live");
        break;
      case DeploymentStatus::Rejected:
        if (stack == nullptr || stack->status != StackStatus::Deleted) fail("rejected stack not deleted");
        break;
      case DeploymentStatus::Failed:
        if (stack != nullptr && stack->status != StackStatus::CreateFailed) fail("failed deploy holds a stack");
        break;
      case DeploymentStatus::Analyzed: fail("record persisted mid-pipeline"); break;
    }
    if (rec.report != make_report(rec, sim_)) fail("report out of date");
  }
}

void Paas::persist(const DeploymentRecord& r) {
  write_text_file(root_ / kDeploymentsDir / (r.deployment_id + ".json"), canonical_dump(record_to_json(r)));
}

void Paas::persist_sim() { write_text_file(root_ / kSimStateFile, sim_.dump()); }

}  // namespace hdeploy
