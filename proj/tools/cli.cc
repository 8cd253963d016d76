// Copyright 2026 The forestfw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tools/cli.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "forestfw/canonical.h"
#include "forestfw/checker.h"
#include "forestfw/netgen.h"
#include "forestfw/policy_lang.h"
#include "forestfw/render.h"
#include "forestfw/sim.h"
#include "forestfw/topo_model.h"

namespace forestfw {
namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string policy;
  std::string topology;
  std::string best_practice;
  std::string out;
  std::string templates;
  std::optional<std::string> scan_ports;
  bool ospf = false;
  bool emit_alloy = false;
};

// Errors carry the exit status they map to.
struct Failure {
  int code;
  std::string message;
};

template <typename T>
using Result = std::variant<T, Failure>;

Failure IoFailure(const absl::Status& status) {
  return {kExitUsage, std::string(status.message())};
}
Failure Finding(const absl::Status& status) {
  return {kExitFindings, std::string(status.message())};
}

absl::StatusOr<std::string> ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot read '", path.string(), "'"));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Writes `files` into a sibling staging directory and swaps it into place,
// so a failed run never leaves a partial tree behind.
absl::Status WriteTree(const fs::path& dir,
                       const std::map<std::string, std::string>& files) {
  std::error_code ec;
  fs::path staging = dir;
  staging += ".partial";
  fs::remove_all(staging, ec);
  if (!fs::create_directories(staging, ec) && ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create '", staging.string(), "': ", ec.message()));
  }
  for (const auto& [name, text] : files) {
    std::ofstream out(staging / name, std::ios::binary);
    out << text;
    if (!out) {
      fs::remove_all(staging, ec);
      return absl::UnavailableError(
          absl::StrCat("cannot write '", (staging / name).string(), "'"));
    }
  }
  fs::remove_all(dir, ec);
  fs::rename(staging, dir, ec);
  if (ec) {
    fs::remove_all(staging, ec);
    return absl::UnavailableError(
        absl::StrCat("cannot move output into '", dir.string(), "'"));
  }
  return absl::OkStatus();
}

struct Inputs {
  std::string policy_text;
  PolicySpec spec;
  Topology topology;
  ZoneModel model;
  CompileOptions options;
};

Result<ZoneModel> LoadModel(const std::string& topology_file,
                            Topology* topology) {
  absl::StatusOr<std::string> text = ReadFile(topology_file);
  if (!text.ok()) return IoFailure(text.status());
  absl::StatusOr<Topology> loaded = LoadTopology(*text);
  if (!loaded.ok()) {
    return Finding(absl::InvalidArgumentError(
        absl::StrCat(topology_file, ": ", loaded.status().message())));
  }
  absl::StatusOr<ZoneModel> zf = BuildZoneFirewallModel(*loaded);
  if (!zf.ok()) {
    return Finding(absl::InvalidArgumentError(
        absl::StrCat(topology_file, ": ", zf.status().message())));
  }
  *topology = *std::move(loaded);
  return DeriveZoneConduit(*zf);
}

Result<Inputs> LoadInputs(const Flags& flags) {
  Inputs in;
  const fs::path policy_path(flags.policy);
  const fs::path policy_dir = policy_path.parent_path();
  absl::StatusOr<std::string> text = ReadFile(policy_path);
  if (!text.ok()) return IoFailure(text.status());
  in.policy_text = *text;
  const Importer importer = MakeImporter({policy_dir.string()});
  absl::StatusOr<PolicySpec> spec =
      ParsePolicy(in.policy_text, importer, flags.policy);
  if (!spec.ok()) return Finding(spec.status());
  in.spec = *std::move(spec);

  Result<ZoneModel> model = LoadModel(flags.topology, &in.topology);
  if (auto* f = std::get_if<Failure>(&model)) return *f;
  in.model = std::get<ZoneModel>(std::move(model));

  if (in.spec.declared_model) {
    fs::path declared = policy_dir / *in.spec.declared_model;
    absl::StatusOr<std::string> declared_text = ReadFile(declared);
    if (!declared_text.ok()) return IoFailure(declared_text.status());
    absl::StatusOr<ZoneModel> declared_model =
        LoadDeclaredModel(*declared_text);
    if (!declared_model.ok()) {
      return Finding(absl::InvalidArgumentError(absl::StrCat(
          declared.string(), ": ", declared_model.status().message())));
    }
    in.options.declared_model = *std::move(declared_model);
  }

  if (!flags.best_practice.empty()) {
    absl::StatusOr<std::string> bp_text = ReadFile(flags.best_practice);
    if (!bp_text.ok()) return IoFailure(bp_text.status());
    const fs::path bp_dir = fs::path(flags.best_practice).parent_path();
    absl::StatusOr<PolicySpec> bp_spec =
        ParsePolicy(*bp_text, MakeImporter({bp_dir.string(), policy_dir.string()}),
                    flags.best_practice);
    if (!bp_spec.ok()) return Finding(bp_spec.status());
    absl::StatusOr<BestPractice> bp = LoadBestPractice(*bp_spec);
    if (!bp.ok()) return Finding(bp.status());
    in.options.best_practice = *std::move(bp);
  }
  in.options.ospf = flags.ospf;
  return in;
}

// Prints diagnostics and returns true when none of them is an error.
bool Report(const Inputs& in, std::ostream& out) {
  for (const std::string& w : in.model.warnings) {
    out << "warning: " << w << "\n";
  }
  std::vector<Diagnostic> diagnostics =
      Preflight(in.spec, in.model, in.options);
  int errors = 0, warnings = 0;
  for (const Diagnostic& d : diagnostics) {
    out << d.ToString() << "\n";
    (d.severity == Severity::kError ? errors : warnings)++;
  }
  out << absl::StrFormat("%d error(s), %d warning(s)\n", errors,
                         warnings + static_cast<int>(in.model.warnings.size()));
  return errors == 0;
}

int RunCheck(const Flags& flags, std::ostream& out, std::ostream& err) {
  Result<Inputs> in = LoadInputs(flags);
  if (auto* f = std::get_if<Failure>(&in)) {
    err << f->message << "\n";
    return f->code;
  }
  const Inputs& inputs = std::get<Inputs>(in);
  const bool ok = Report(inputs, out);
  if (flags.emit_alloy) {
    absl::StatusOr<std::vector<FlowRule>> flows = ExpandRules(inputs.spec);
    if (flows.ok()) out << EmitAlloy(inputs.spec, *flows);
  }
  return ok ? kExitOk : kExitFindings;
}

int RunCompile(const Flags& flags, std::ostream& out, std::ostream& err) {
  Result<Inputs> in = LoadInputs(flags);
  if (auto* f = std::get_if<Failure>(&in)) {
    err << f->message << "\n";
    return f->code;
  }
  const Inputs& inputs = std::get<Inputs>(in);
  if (!Report(inputs, out)) {
    err << "compilation stopped; nothing written\n";
    return kExitFindings;
  }
  absl::StatusOr<NetworkPolicy> policy =
      Compile(inputs.spec, inputs.topology, inputs.options);
  if (!policy.ok()) {
    err << policy.status().message() << "\n";
    return kExitFindings;
  }

  const std::optional<std::string> template_dir =
      flags.templates.empty() ? std::nullopt
                              : std::optional<std::string>(flags.templates);
  std::map<std::string, DeviceTemplate> templates;
  for (std::string_view vendor : {kIptablesLike, kAsaLike}) {
    absl::StatusOr<DeviceTemplate> t = DeviceTemplate::Load(vendor, template_dir);
    if (!t.ok()) {
      err << t.status().message() << "\n";
      return kExitUsage;
    }
    templates.emplace(std::string(vendor), *std::move(t));
  }

  std::map<std::string, std::string> files;
  std::vector<std::string> device_texts;
  for (const FirewallConfig& fw : policy->firewalls) {
    files[absl::StrCat(fw.name, ".neutral.acl")] = RenderNeutralFile(fw);
    for (const auto& [vendor, suffix] :
         {std::pair{kIptablesLike, ".iptables.txt"},
          std::pair{kAsaLike, ".asa.txt"}}) {
      absl::StatusOr<std::string> text =
          RenderDevice(fw, templates.at(std::string(vendor)));
      if (!text.ok()) {
        err << text.status().message() << "\n";
        return kExitFindings;
      }
      if (fw.vendor == vendor) device_texts.push_back(*text);
      files[absl::StrCat(fw.name, suffix)] = *std::move(text);
    }
  }
  files["zone_firewall.dot"] =
      ExportDot(policy->model, GraphFlavor::kZoneFirewall);
  files["zone_conduit.dot"] = ExportDot(policy->model, GraphFlavor::kZoneConduit);
  if (flags.emit_alloy) {
    files["policy.als"] = EmitAlloy(inputs.spec, policy->flows);
  }
  const LocMetrics loc = ComputeLocMetrics(inputs.policy_text, device_texts);
  std::map<std::string, std::string> manifest_inputs = {
      {"policy", fs::path(flags.policy).filename().string()},
      {"topology", fs::path(flags.topology).filename().string()}};
  if (!flags.best_practice.empty()) {
    manifest_inputs["best_practice"] =
        fs::path(flags.best_practice).filename().string();
  }
  files["manifest.json"] = WriteManifest(*policy, manifest_inputs, loc);

  if (absl::Status s = WriteTree(flags.out, files); !s.ok()) {
    err << s.message() << "\n";
    return kExitUsage;
  }
  out << absl::StrFormat(
      "compiled %d firewall(s), %d flow(s) into %s\n"
      "loc: high-level %d, device %d, ratio %.2f\n",
      policy->firewalls.size(), policy->flows.size(), flags.out,
      loc.high_level_loc, loc.device_loc, loc.ratio);
  return kExitOk;
}

int RunSimulate(const Flags& flags, std::ostream& out, std::ostream& err) {
  const fs::path dir(flags.out);
  absl::StatusOr<std::string> manifest = ReadFile(dir / "manifest.json");
  if (!manifest.ok()) {
    err << manifest.status().message() << "\n";
    return kExitUsage;
  }
  absl::StatusOr<NetworkPolicy> policy = ReadManifest(
      *manifest,
      [&](const std::string& name) { return ReadFile(dir / name); });
  if (!policy.ok()) {
    err << policy.status().message() << "\n";
    return kExitUsage;
  }
  ScanSpec scan = ScanSpec::Default(policy->flows);
  if (flags.scan_ports) {
    absl::StatusOr<IntervalSet> ports = ParsePortSpec(*flags.scan_ports);
    if (!ports.ok()) {
      err << ports.status().message() << "\n";
      return kExitUsage;
    }
    scan.ports = *ports;
  }

  int passed = 0;
  std::vector<VetResult> results = VetPositive(*policy);
  for (const VetResult& r : results) {
    out << r.ToString() << "\n";
    passed += r.outcome;
  }
  std::vector<Leak> leaks = VetNegative(*policy, scan);
  for (const Leak& leak : leaks) out << leak.ToString() << "\n";
  out << absl::StrFormat("positive: %d/%d pass; negative: %d leak(s)\n",
                         passed, results.size(), leaks.size());
  return passed == static_cast<int>(results.size()) && leaks.empty()
             ? kExitOk
             : kExitFindings;
}

int RunGraph(const Flags& flags, std::ostream& out, std::ostream& err) {
  Topology topology;
  Result<ZoneModel> model = LoadModel(flags.topology, &topology);
  if (auto* f = std::get_if<Failure>(&model)) {
    err << f->message << "\n";
    return f->code;
  }
  const ZoneModel& m = std::get<ZoneModel>(model);
  for (const std::string& w : m.warnings) out << "warning: " << w << "\n";
  absl::Status s =
      WriteTree(flags.out, {{"zone_firewall.dot",
                             ExportDot(m, GraphFlavor::kZoneFirewall)},
                            {"zone_conduit.dot",
                             ExportDot(m, GraphFlavor::kZoneConduit)}});
  if (!s.ok()) {
    err << s.message() << "\n";
    return kExitUsage;
  }
  out << absl::StrFormat("%d zone(s), %d conduit(s) written to %s\n",
                         m.zones.size(), m.conduits.size(), flags.out);
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Firewall policy compiler and verifier", "forestfw"};
  app.require_subcommand(1);
  Flags flags;

  CLI::App* check = app.add_subcommand(
      "check", "Validate a policy against a topology and best practice");
  CLI::App* compile = app.add_subcommand(
      "compile", "Generate neutral and device configurations");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Vet a compiled output directory in the simulator");
  CLI::App* graph =
      app.add_subcommand("graph", "Export zone graphs of a topology");

  for (CLI::App* cmd : {check, compile}) {
    cmd->add_option("--policy", flags.policy, "Policy source file")
        ->required();
    cmd->add_option("--topology", flags.topology, "GraphML topology")
        ->required();
    cmd->add_option("--best-practice", flags.best_practice,
                    "Best-practice policy document");
    cmd->add_flag("--ospf", flags.ospf, "Permit OSPF neighbour discovery");
    cmd->add_flag("--emit-alloy", flags.emit_alloy,
                  "Also emit the Alloy overlap model");
  }
  compile->add_option("--out", flags.out, "Output directory")->required();
  compile->add_option("--templates", flags.templates,
                      "Directory of <vendor>.tmpl overrides");
  simulate->add_option("--out,--compiled", flags.out,
                       "Directory written by compile")
      ->required();
  simulate->add_option("--scan-ports", flags.scan_ports,
                       "Negative scan ports, e.g. 0-1023,8080");
  graph->add_option("--topology", flags.topology, "GraphML topology")
      ->required();
  graph->add_option("--out", flags.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }
  if (check->parsed()) return RunCheck(flags, out, err);
  if (compile->parsed()) return RunCompile(flags, out, err);
  if (simulate->parsed()) return RunSimulate(flags, out, err);
  return RunGraph(flags, out, err);
}

}  // namespace forestfw
