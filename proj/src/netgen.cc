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

#include "forestfw/netgen.h"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "forestfw/checker.h"

namespace forestfw {
namespace {

bool IsFirewallZone(const ZoneModel& model, std::string_view zone) {
  const Zone* z = model.FindZone(zone);
  return z != nullptr && z->kind == ZoneKind::kFirewall;
}

std::string FirewallOf(const ZoneModel& model, std::string_view fwz) {
  for (const auto& [fw, zone] : model.firewall_zone) {
    if (zone == fwz) return fw;
  }
  return "";
}

std::string InterfaceOrSelf(const ZoneModel& model, const std::string& firewall,
                            const std::string& zone) {
  auto it = model.firewall_zone.find(firewall);
  if (it != model.firewall_zone.end() && it->second == zone) {
    return std::string(kSelfInterface);
  }
  return model.InterfaceToward(firewall, zone).value_or("");
}

// Expands a zone sequence into every firewall realization that satisfies
// the interface and firewall-zone constraints.
void Realize(const ZoneModel& model, const std::vector<std::string>& zones,
             std::vector<ZonePath>& out) {
  std::set<std::string> endpoint_firewalls;
  for (const std::string& end : {zones.front(), zones.back()}) {
    if (IsFirewallZone(model, end)) endpoint_firewalls.insert(FirewallOf(model, end));
  }
  std::vector<Hop> hops;
  std::function<void(size_t)> step = [&](size_t i) {
    if (i + 1 == zones.size()) {
      std::set<std::pair<std::string, std::string>> used;
      std::map<std::string, int> visits;
      for (const Hop& h : hops) {
        if (!used.insert({h.firewall, h.in_interface}).second) return;
        if (!used.insert({h.firewall, h.out_interface}).second) return;
        ++visits[h.firewall];
      }
      for (const std::string& fw : endpoint_firewalls) {
        if (visits[fw] != 1) return;
      }
      out.push_back(ZonePath{zones, hops});
      return;
    }
    const Conduit* conduit = model.FindConduit(zones[i], zones[i + 1]);
    for (const std::string& fw : conduit->firewalls) {
      hops.push_back(Hop{fw, zones[i], zones[i + 1],
                         InterfaceOrSelf(model, fw, zones[i]),
                         InterfaceOrSelf(model, fw, zones[i + 1])});
      step(i + 1);
      hops.pop_back();
    }
  };
  step(0);
}

std::string ShortName(const std::string& name) {
  size_t dot = name.rfind('.');
  return dot == std::string::npos ? name : name.substr(dot + 1);
}

std::string FlowComment(const FlowRule& flow, bool reverse) {
  const std::string& what =
      flow.service.comment.empty() ? ShortName(flow.service.name)
                                   : flow.service.comment;
  return absl::StrCat(flow.rule_name, ": ", what, " (", flow.src_zone, " to ",
                      flow.dst_zone, reverse ? ", return path)" : ", forward path)");
}

std::set<std::string> LoggedRules(const PolicySpec& spec) {
  std::set<std::string> out;
  if (!spec.global_policy) return out;
  auto reporting = spec.reporting_rules.find(spec.global_policy->reporting_rule);
  if (reporting == spec.reporting_rules.end() ||
      reporting->second.use_case != "verification") {
    return out;
  }
  for (const std::string& name : reporting->second.ReferencedRuleGroups()) {
    if (auto group = spec.rule_groups.find(name);
        group != spec.rule_groups.end()) {
      out.insert(group->second.begin(), group->second.end());
    } else if (spec.rules.count(name)) {
      out.insert(name);
    }
  }
  return out;
}

using AclKey = std::tuple<std::string, std::string, Direction>;

void AppendUnique(std::vector<AclRule>& acl, const std::vector<AclRule>& rules) {
  for (const AclRule& r : rules) {
    if (std::find(acl.begin(), acl.end(), r) == acl.end()) acl.push_back(r);
  }
}

}  // namespace

std::string ZonePath::ToString() const {
  std::string out = zones.empty() ? "" : zones.front();
  for (const Hop& h : hops) {
    absl::StrAppend(&out, " -[", h.firewall, " ", h.in_interface, ">",
                    h.out_interface, "]- ", h.to_zone);
  }
  return out;
}

absl::StatusOr<std::vector<ZonePath>> EnumeratePaths(const ZoneModel& model,
                                                     std::string_view src,
                                                     std::string_view dst) {
  for (std::string_view z : {src, dst}) {
    if (!model.FindZone(z)) {
      return absl::NotFoundError(
          absl::StrCat("zone '", std::string(z), "' not in the model"));
    }
  }
  if (src == dst) {
    return absl::InvalidArgumentError(
        absl::StrCat("flow from zone '", std::string(src), "' to itself"));
  }
  std::vector<ZonePath> out;
  std::vector<std::string> path = {std::string(src)};
  std::set<std::string> on_path = {std::string(src)};
  std::function<void()> dfs = [&] {
    const std::string& here = path.back();
    if (here == dst) {
      Realize(model, path, out);
      return;
    }
    if (path.size() > 1 && IsFirewallZone(model, here)) return;
    for (const std::string& next : model.Neighbors(here)) {
      if (on_path.count(next)) continue;
      path.push_back(next);
      on_path.insert(next);
      dfs();
      on_path.erase(next);
      path.pop_back();
    }
  };
  dfs();
  if (out.empty()) {
    return absl::NotFoundError(absl::StrCat("no valid path from ",
                                            std::string(src), " to ",
                                            std::string(dst)));
  }
  return out;
}

absl::StatusOr<std::vector<AclRule>> TranslateRule(const FlowRule& flow,
                                                   const ZoneModel& model,
                                                   bool log) {
  const Zone* src = model.FindZone(flow.src_zone);
  const Zone* dst = model.FindZone(flow.dst_zone);
  for (const auto& [name, zone] :
       {std::pair{flow.src_zone, src}, std::pair{flow.dst_zone, dst}}) {
    if (zone == nullptr) {
      return absl::NotFoundError(
          absl::StrCat("zone '", name, "' not in the model"));
    }
    if (zone->cidrs.empty()) {
      return absl::FailedPreconditionError(
          absl::StrCat("zone '", name, "' has no addresses"));
    }
  }
  std::vector<AclRule> out;
  for (const Cidr& s : src->cidrs) {
    for (const Cidr& d : dst->cidrs) {
      AclRule r;
      r.action = AclAction::kPermit;
      r.protocol = flow.service.protocol;
      r.src = s;
      r.dst = d;
      if (HasPorts(r.protocol)) {
        r.sport = flow.service.source_ports;
        r.dport = flow.service.dest_ports;
      }
      if (r.protocol == kProtoIcmp) r.icmp_types = flow.service.icmp_types;
      r.log = log;
      r.comment = FlowComment(flow, /*reverse=*/false);
      out.push_back(std::move(r));
    }
  }
  return out;
}

SupplementedRules AddSupplementaryRules(std::vector<AclRule> forward,
                                        const FlowRule& flow) {
  SupplementedRules out;
  const int protocol = flow.service.protocol;
  for (AclRule& r : forward) {
    if (protocol == kProtoTcp) r.state = kStateNew | kStateEstablished;
    if (HasPorts(protocol)) {
      AclRule back = r;
      std::swap(back.src, back.dst);
      std::swap(back.sport, back.dport);
      back.state = protocol == kProtoTcp ? kStateEstablished : kStateAny;
      back.comment = FlowComment(flow, /*reverse=*/true);
      out.reverse.push_back(std::move(back));
    }
  }
  out.forward = std::move(forward);
  return out;
}

std::vector<AclRule> OspfRules() {
  std::vector<AclRule> out;
  for (const char* group : {"224.0.0.5/32", "224.0.0.6/32"}) {
    AclRule r;
    r.protocol = kProtoOspf;
    r.dst = *Cidr::Parse(group);
    r.comment = "ospf: neighbour discovery";
    out.push_back(std::move(r));
  }
  return out;
}

std::string_view DirectionName(Direction direction) {
  return direction == Direction::kInbound ? "in" : "out";
}

const Acl* FirewallConfig::FindAcl(std::string_view name) const {
  for (const Acl& acl : acls) {
    if (acl.name == name) return &acl;
  }
  return nullptr;
}

const Acl* FirewallConfig::AclFor(std::string_view interface,
                                  Direction direction) const {
  for (const InterfaceAssignment& a : assignments) {
    if (a.interface == interface && a.direction == direction) {
      return FindAcl(a.acl);
    }
  }
  return nullptr;
}

const FirewallConfig* NetworkPolicy::FindFirewall(std::string_view name) const {
  for (const FirewallConfig& fw : firewalls) {
    if (fw.name == name) return &fw;
  }
  return nullptr;
}

std::vector<Diagnostic> Preflight(const PolicySpec& spec,
                                  const ZoneModel& derived,
                                  const CompileOptions& options) {
  std::vector<Diagnostic> out = ValidateSpec(spec);
  const SourceLocation file_loc{spec.file, 0, 0};

  if (options.declared_model) {
    CrosscheckResult r = CrosscheckModel(derived, *options.declared_model);
    if (!r.ok()) {
      out.push_back(MakeError(
          file_loc, absl::StrCat("declared zone-conduit model does not match "
                                 "the topology: ",
                                 absl::StrJoin(absl::StrSplit(r.Report(), '\n'),
                                               "; "))));
    }
  }
  std::set<std::string> known;
  for (const Zone& z : derived.zones) known.insert(z.name);
  for (const std::string& zone : spec.ReferencedZones()) {
    if (!known.count(zone)) {
      out.push_back(MakeError(
          file_loc, absl::StrCat("zone '", zone, "' is not in the topology")));
    }
  }
  if (HasErrors(out)) return out;

  absl::StatusOr<std::vector<FlowRule>> flows = ExpandRules(spec);
  if (!flows.ok()) {
    out.push_back(MakeError(file_loc, std::string(flows.status().message())));
    return out;
  }
  for (const OverlapReport& r : FindRuleOverlaps(*flows)) {
    out.push_back(MakeError(spec.LocationOf(r.rule_a), r.Message()));
  }
  if (options.best_practice) {
    absl::StatusOr<std::vector<BestPracticeViolation>> violations =
        CheckBestPractice(*flows, known, *options.best_practice);
    if (!violations.ok()) {
      out.push_back(MakeError(SourceLocation{options.best_practice->file, 0, 0},
                              std::string(violations.status().message())));
    } else {
      for (const BestPracticeViolation& v : *violations) {
        SourceLocation loc = v.rules.empty() ? file_loc
                                             : spec.LocationOf(v.rules.front());
        out.push_back(MakeError(loc, v.Message()));
      }
    }
  }
  return out;
}

absl::StatusOr<NetworkPolicy> CompileFlows(std::vector<FlowRule> flows,
                                           const PolicySpec& spec,
                                           const Topology& topology,
                                           ZoneModel model,
                                           const CompileOptions& options) {
  std::map<AclKey, std::vector<AclRule>> acls;
  for (const Attachment& a : model.attachments) {
    if (a.interface == kSelfInterface) continue;
    acls[{a.firewall, a.interface, Direction::kInbound}];
  }
  for (const auto& [fw, fwz] : model.firewall_zone) {
    acls[{fw, std::string(kSelfInterface), Direction::kInbound}];
    acls[{fw, std::string(kSelfInterface), Direction::kOutbound}];
  }

  const std::set<std::string> logged = LoggedRules(spec);
  for (const FlowRule& flow : flows) {
    absl::StatusOr<std::vector<ZonePath>> paths =
        EnumeratePaths(model, flow.src_zone, flow.dst_zone);
    if (!paths.ok()) {
      return absl::FailedPreconditionError(absl::StrCat(
          "rule '", flow.rule_name, "' (", flow.src_zone, " -> ",
          flow.dst_zone, "): ", paths.status().message()));
    }
    absl::StatusOr<std::vector<AclRule>> forward =
        TranslateRule(flow, model, logged.count(flow.rule_name) > 0);
    if (!forward.ok()) {
      return absl::FailedPreconditionError(absl::StrCat(
          "rule '", flow.rule_name, "': ", forward.status().message()));
    }
    SupplementedRules rules = AddSupplementaryRules(*std::move(forward), flow);
    for (const ZonePath& path : *paths) {
      for (const Hop& h : path.hops) {
        const std::string self(kSelfInterface);
        AclKey fwd, back;
        if (h.out_interface == self) {
          fwd = {h.firewall, self, Direction::kInbound};
          back = {h.firewall, self, Direction::kOutbound};
        } else if (h.in_interface == self) {
          fwd = {h.firewall, self, Direction::kOutbound};
          back = {h.firewall, self, Direction::kInbound};
        } else {
          fwd = {h.firewall, h.in_interface, Direction::kInbound};
          back = {h.firewall, h.out_interface, Direction::kInbound};
        }
        AppendUnique(acls[fwd], rules.forward);
        AppendUnique(acls[back], rules.reverse);
      }
    }
  }

  NetworkPolicy out;
  std::map<std::string, int> counters;
  for (auto& [key, rules] : acls) {
    const auto& [fw, iface, direction] = key;
    if (options.ospf && iface == kSelfInterface) {
      AppendUnique(rules, OspfRules());
    }
    rules.push_back(AclRule::DenyAll());
    if (out.firewalls.empty() || out.firewalls.back().name != fw) {
      FirewallConfig config;
      config.name = fw;
      if (const Device* d = topology.Find(fw)) config.vendor = d->vendor;
      out.firewalls.push_back(std::move(config));
    }
    FirewallConfig& config = out.firewalls.back();
    std::string name = absl::StrCat("acl_", ++counters[fw]);
    config.acls.push_back(Acl{name, std::move(rules)});
    config.assignments.push_back(InterfaceAssignment{fw, iface, direction, name});
  }
  out.model = std::move(model);
  out.flows = std::move(flows);
  return out;
}

absl::StatusOr<NetworkPolicy> Compile(const PolicySpec& spec,
                                      const Topology& topology,
                                      const CompileOptions& options) {
  absl::StatusOr<ZoneModel> built = BuildZoneFirewallModel(topology);
  if (!built.ok()) return built.status();
  ZoneModel model = DeriveZoneConduit(*std::move(built));
  std::vector<Diagnostic> diagnostics = Preflight(spec, model, options);
  if (HasErrors(diagnostics)) {
    std::vector<std::string> lines;
    for (const Diagnostic& d : diagnostics) {
      if (d.severity == Severity::kError) lines.push_back(d.ToString());
    }
    return absl::FailedPreconditionError(absl::StrJoin(lines, "\n"));
  }
  absl::StatusOr<std::vector<FlowRule>> flows = ExpandRules(spec);
  if (!flows.ok()) return flows.status();
  return CompileFlows(*std::move(flows), spec, topology, std::move(model),
                      options);
}

int CountGenericPermits(const NetworkPolicy& policy) {
  const IntervalSet full = IntervalSet::Of(0, kMaxPort);
  int count = 0;
  for (const FirewallConfig& fw : policy.firewalls) {
    for (const Acl& acl : fw.acls) {
      for (const AclRule& r : acl.rules) {
        if (r.action != AclAction::kPermit) continue;
        if (r.protocol == kIpWildcard ||
            (HasPorts(r.protocol) && r.sport == full && r.dport == full)) {
          ++count;
        }
      }
    }
  }
  return count;
}

int CountUnassignedAcls(const NetworkPolicy& policy) {
  int count = 0;
  for (const FirewallConfig& fw : policy.firewalls) {
    for (const Acl& acl : fw.acls) {
      if (std::none_of(fw.assignments.begin(), fw.assignments.end(),
                       [&](const InterfaceAssignment& a) {
                         return a.acl == acl.name;
                       })) {
        ++count;
      }
    }
  }
  return count;
}

}  // namespace forestfw
