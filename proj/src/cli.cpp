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

#include "hdeploy/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hdeploy/paas_pipeline.hpp"

namespace hdeploy {
namespace {

enum class Format { Human, Json };

struct Options {
  std::string workspace;
  std::string format = "human";
  std::string source;
  std::string patterns;
  std::string inventory;
  std::string host_mode = "container";
  std::string deployment;
  std::string resource;
  std::string logic;
  double threshold = 0.8;
  std::size_t min_tokens = kDefaultMinMatchTokens;
};

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

std::string lines_text(const LineRange& r) {
  return std::to_string(r.first) + "-" + std::to_string(r.last);
}

DeployConfig deploy_config(const Options& o) {
  DeployConfig cfg;
  cfg.detector.similarity_threshold = o.threshold;
  cfg.detector.min_match_tokens = o.min_tokens;
  cfg.detector.validate();
  cfg.host_mode = *parse_provisioning_mode(o.host_mode);
  return cfg;
}

Json match_summary_json(const std::vector<CloneMatch>& matches) {
  Json list = Json::array();
  for (const auto& m : matches) {
    list.push_back(Json{{"pattern_id", m.pattern_id},
                        {"lines", Json::array({m.source_lines.first, m.source_lines.last})},
                        {"tokens", Json::array({m.source_tokens.start, m.source_tokens.end})},
                        {"similarity", m.similarity}});
  }
  return list;
}

void print_report(const DeploymentReport& r, Format fmt, std::ostream& out) {
  if (fmt == Format::Json) {
    out << canonical_dump(report_to_json(r)) << "\n";
    return;
  }
  out << "deployment " << r.deployment_id << ": " << to_string(r.status)
      << (r.billing_started ? " (billing started)" : " (billing not started)") << "\n";
  if (r.failure_reason) out << "failure: " << *r.failure_reason << "\n";
  out << r.matches.size() << (r.matches.size() == 1 ? " match" : " matches") << "\n";
  for (const auto& m : r.matches) {
    out << "  " << m.pattern_id << " lines " << lines_text(m.lines) << " similarity " << fixed(m.similarity, 3)
        << "\n";
  }
  if (!r.servers.empty()) out << "servers:\n";
  for (const auto& s : r.servers) {
    out << "  " << s.resource_name << " -> " << s.server_id << " " << s.server_kind << " " << s.provisioning_mode;
    if (s.logic_id) out << " logic " << *s.logic_id;
    if (s.active_logic_id) out << " active " << (s.active_logic_id->empty() ? "(blank)" : *s.active_logic_id);
    if (s.needs_fpga_configuration) out << " configure-before-run";
    out << "\n";
  }
  out << "cost: " << fixed(r.cost.total_hourly.units(), 6) << " " << r.cost.currency << "/hour\n";
  for (const auto& li : r.cost.line_items)
    out << "  " << li.server_id << " " << fixed(li.hourly_cost.units(), 6) << "\n";
  for (const auto& k : r.kernels) out << "kernel: " << k << "\n";
  for (const auto& n : r.notes) out << "note: " << n << "\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
}

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::Input: return kExitInput;
    case ErrorCategory::Provisioning: return kExitProvisioning;
    case ErrorCategory::Lifecycle: return kExitLifecycle;
    case ErrorCategory::Internal: return kExitInternal;
  }
  return kExitInternal;
}

int cmd_analyze(const Options& o, Format fmt, std::ostream& out) {
  const DeployConfig cfg = deploy_config(o);
  const PatternDB db = load_pattern_db(o.patterns, cfg.detector.min_match_tokens);
  const std::string text = read_text_file(o.source);
  const auto tokens = tokenize(text);
  const auto matches = detect(normalize(tokens), db, cfg.detector);
  if (fmt == Format::Json) {
    Json j = Json::object();
    j["source"] = std::filesystem::path(o.source).filename().string();
    j["match_count"] = matches.size();
    j["matches"] = match_summary_json(matches);
    out << canonical_dump(j) << "\n";
    return kExitOk;
  }
  out << matches.size() << (matches.size() == 1 ? " match" : " matches") << "\n";
  for (const auto& m : matches) {
    const CodePattern* p = db.find(m.pattern_id);
    out << "  " << m.pattern_id << " (" << to_string(p->device_target) << ") lines " << lines_text(m.source_lines)
        << " tokens " << m.source_tokens.start << "-" << m.source_tokens.end << " similarity "
        << fixed(m.similarity, 3) << "\n";
  }
  return kExitOk;
}

int cmd_deploy(const Options& o, Format fmt, std::ostream& out) {
  const DeployConfig cfg = deploy_config(o);
  Paas paas(o.workspace);
  const DeploymentRecord rec = paas.deploy(o.source, o.patterns, o.inventory, cfg);
  print_report(rec.report, fmt, out);
  return rec.status == DeploymentStatus::Provisioned ? kExitOk : kExitProvisioning;
}

int cmd_list(const Options& o, Format fmt, std::ostream& out) {
  Paas paas(o.workspace);
  const auto list = paas.list_deployments();
  if (fmt == Format::Json) {
    Json arr = Json::array();
    for (const auto& s : list) {
      arr.push_back(Json{{"deployment_id", s.deployment_id},
                         {"source_name", s.source_name},
                         {"status", std::string(to_string(s.status))},
                         {"billing_started", s.billing_started},
                         {"match_count", s.match_count},
                         {"total_hourly", s.total_hourly.units()}});
    }
    out << canonical_dump(Json{{"deployments", std::move(arr)}}) << "\n";
    return kExitOk;
  }
  out << list.size() << (list.size() == 1 ? " deployment" : " deployments") << "\n";
  for (const auto& s : list) {
    out << "  " << s.deployment_id << " " << to_string(s.status) << " " << s.source_name << " matches "
        << s.match_count << " cost " << fixed(s.total_hourly.units(), 6) << "\n";
  }
  return kExitOk;
}

int cmd_patterns_validate(const Options& o, Format fmt, std::ostream& out) {
  const PatternDB db = load_pattern_db(o.patterns, o.min_tokens);
  if (fmt == Format::Json) {
    Json arr = Json::array();
    for (const auto& p : db.patterns()) {
      Json e{{"id", p.id}, {"device_target", std::string(to_string(p.device_target))},
             {"fingerprint_tokens", db.fingerprint(p.id).size()}};
      if (p.logic_id) e["logic_id"] = *p.logic_id;
      arr.push_back(std::move(e));
    }
    out << canonical_dump(Json{{"valid", true}, {"patterns", std::move(arr)}}) << "\n";
    return kExitOk;
  }
  out << "ok: " << db.size() << (db.size() == 1 ? " pattern" : " patterns") << "\n";
  for (const auto& p : db.patterns()) {
    out << "  " << p.id << " " << to_string(p.device_target) << " " << db.fingerprint(p.id).size() << " tokens";
    if (p.logic_id) out << " logic " << *p.logic_id;
    out << "\n";
  }
  return kExitOk;
}

int cmd_inventory_show(const Options& o, Format fmt, std::ostream& out) {
  const Inventory inv = load_inventory(o.inventory);
  if (fmt == Format::Json) {
    out << render_inventory(inv) << "\n";
    return kExitOk;
  }
  out << inv.servers().size() << " servers\n";
  for (const auto& s : inv.servers()) {
    out << "  " << s.server_id << " " << to_string(s.kind) << " modes";
    for (auto m : s.provisioning_modes) out << " " << to_string(m);
    out << " slots " << s.capacity_slots << " cost " << fixed(s.hourly_cost.units(), 6);
    for (const auto& l : s.configured_logic_ids) out << " logic " << l;
    out << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  const char* env_ws = std::getenv("HETERO_WORKSPACE");
  o.workspace = env_ws != nullptr && *env_ws != '\0' ? env_ws : "workspace";

  CLI::App app{"Offload-aware application deployment for heterogeneous IaaS clouds", "hdeploy"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("-w,--workspace", o.workspace, "Workspace directory (default: $HETERO_WORKSPACE or ./workspace)");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"human", "json"}));

  auto detector_flags = [&](CLI::App* sub) {
    sub->add_option("--threshold", o.threshold, "Similarity threshold in (0, 1]");
    sub->add_option("--min-tokens", o.min_tokens, "Minimum clone length in tokens");
  };

  auto* analyze = app.add_subcommand("analyze", "Detect offloadable regions without provisioning");
  analyze->add_option("source", o.source)->required();
  analyze->add_option("--patterns", o.patterns)->required();
  detector_flags(analyze);

  auto* deploy = app.add_subcommand("deploy", "Run the full deployment pipeline");
  deploy->add_option("source", o.source)->required();
  deploy->add_option("--patterns", o.patterns)->required();
  deploy->add_option("--inventory", o.inventory)->required();
  deploy->add_option("--host-mode", o.host_mode)->check(CLI::IsMember({"vm", "container", "baremetal"}));
  detector_flags(deploy);

  auto* approve = app.add_subcommand("approve", "Accept a provisioned deployment and start billing");
  approve->add_option("id", o.deployment)->required();
  auto* reject = app.add_subcommand("reject", "Decline a provisioned deployment and delete its stack");
  reject->add_option("id", o.deployment)->required();
  auto* reconfigure = app.add_subcommand("reconfigure", "Load different logic onto a deployed FPGA");
  reconfigure->add_option("id", o.deployment)->required();
  reconfigure->add_option("resource", o.resource)->required();
  reconfigure->add_option("logic", o.logic)->required();

  auto* list = app.add_subcommand("list", "List deployments in the workspace");
  auto* report = app.add_subcommand("report", "Show one deployment report");
  report->add_option("id", o.deployment)->required();

  auto* patterns = app.add_subcommand("patterns", "Pattern DB utilities");
  patterns->require_subcommand(1);
  auto* validate = patterns->add_subcommand("validate", "Validate a pattern DB file");
  validate->add_option("db", o.patterns)->required();
  validate->add_option("--min-tokens", o.min_tokens, "Minimum snippet length in tokens");

  auto* inventory = app.add_subcommand("inventory", "Inventory utilities");
  inventory->require_subcommand(1);
  auto* show = inventory->add_subcommand("show", "Print an inventory file");
  show->add_option("inventory", o.inventory)->required();

  auto* sim = app.add_subcommand("sim", "Simulator utilities");
  sim->require_subcommand(1);
  auto* dump = sim->add_subcommand("dump", "Print the simulator state as canonical JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitInput;
  }

  const Format fmt = o.format == "json" ? Format::Json : Format::Human;
  try {
    if (analyze->parsed()) return cmd_analyze(o, fmt, out);
    if (deploy->parsed()) return cmd_deploy(o, fmt, out);
    if (approve->parsed() || reject->parsed() || reconfigure->parsed()) {
      Paas paas(o.workspace);
      DeploymentRecord rec = approve->parsed()  ? paas.approve(o.deployment)
                             : reject->parsed() ? paas.reject(o.deployment)
                                                : paas.reconfigure(o.deployment, o.resource, o.logic);
      print_report(rec.report, fmt, out);
      return kExitOk;
    }
    if (list->parsed()) return cmd_list(o, fmt, out);
    if (report->parsed()) {
      Paas paas(o.workspace);
      print_report(paas.get_report(o.deployment), fmt, out);
      return kExitOk;
    }
    if (validate->parsed()) return cmd_patterns_validate(o, fmt, out);
    if (show->parsed()) return cmd_inventory_show(o, fmt, out);
    if (dump->parsed()) {
      Paas paas(o.workspace);
      out << paas.sim().dump() << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  err << "error: no command\n";
  return kExitInput;
}

}  // namespace hdeploy
