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

#include "forestfw/checker.h"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace forestfw {
namespace {

// Header region plus connection state (0 = NEW, 1 = ESTABLISHED).
struct Box {
  std::array<IntervalSet, 7> dims;

  bool Empty() const {
    return std::any_of(dims.begin(), dims.end(),
                       [](const IntervalSet& d) { return d.empty(); });
  }
  Box Intersect(const Box& other) const {
    Box out;
    for (size_t i = 0; i < dims.size(); ++i) {
      out.dims[i] = dims[i].Intersect(other.dims[i]);
    }
    return out;
  }
};

Box BoxOf(const AclRule& rule) {
  Predicate p = rule.ToPredicate();
  IntervalSet state;
  if (rule.state == kStateAny || (rule.state & kStateNew)) state.Add({0, 0});
  if (rule.state == kStateAny || (rule.state & kStateEstablished)) {
    state.Add({1, 1});
  }
  return Box{{p.src, p.dst, p.protocol, p.sport, p.dport, p.icmp, state}};
}

// a minus b as a list of disjoint boxes.
std::vector<Box> Subtract(const Box& a, const Box& b) {
  if (a.Intersect(b).Empty()) return {a};
  std::vector<Box> out;
  Box rest = a;
  for (size_t d = 0; d < rest.dims.size(); ++d) {
    IntervalSet outside = rest.dims[d].Subtract(b.dims[d]);
    if (!outside.empty()) {
      Box piece = rest;
      piece.dims[d] = std::move(outside);
      out.push_back(std::move(piece));
    }
    rest.dims[d] = rest.dims[d].Intersect(b.dims[d]);
  }
  return out;
}

bool CoveredBy(const Box& target, const std::vector<const Box*>& covers) {
  std::vector<Box> residual = {target};
  for (const Box* cover : covers) {
    std::vector<Box> next;
    for (const Box& r : residual) {
      std::vector<Box> pieces = Subtract(r, *cover);
      next.insert(next.end(), pieces.begin(), pieces.end());
    }
    residual = std::move(next);
    if (residual.empty()) return true;
  }
  return residual.empty();
}

std::string AclRuleName(const Acl& acl, size_t index) {
  const AclRule& rule = acl.rules[index];
  std::string out = absl::StrCat(acl.name, "#", index + 1);
  if (!rule.comment.empty()) absl::StrAppend(&out, " (", rule.comment, ")");
  return out;
}

Predicate WitnessOf(const Box& box) {
  return Predicate{box.dims[0], box.dims[1], box.dims[2],
                   box.dims[3], box.dims[4], box.dims[5]};
}

}  // namespace

std::string_view OverlapKindName(OverlapKind kind) {
  switch (kind) {
    case OverlapKind::kHighLevelOverlap:
      return "high_level_overlap";
    case OverlapKind::kAclRedundancy:
      return "acl_redundancy";
    case OverlapKind::kAclShadow:
      return "acl_shadow";
  }
  return "?";
}

std::string OverlapReport::Message() const {
  std::string out = absl::StrCat(std::string(OverlapKindName(kind)), ": ",
                                 rule_a, " and ", rule_b);
  if (shared.empty()) {
    absl::StrAppend(&out, " share ", witness.ToString());
    return out;
  }
  std::vector<std::string> parts;
  for (const Shared& s : shared) {
    parts.push_back(absl::StrCat(s.src_zone, " -> ", s.dst_zone, " ",
                                 s.service.Describe()));
  }
  absl::StrAppend(&out, " overlap on ", absl::StrJoin(parts, "; "));
  return out;
}

std::optional<Service> ServiceIntersection(const Service& a, const Service& b) {
  if (a.protocol == kAnyProtocol) return b;
  if (b.protocol == kAnyProtocol) return a;
  if (a.protocol != b.protocol) return std::nullopt;
  Service out;
  out.name = a.name == b.name ? a.name : absl::StrCat(a.name, "^", b.name);
  out.protocol = a.protocol;
  if (HasPorts(a.protocol)) {
    out.source_ports = a.source_ports.Intersect(b.source_ports);
    out.dest_ports = a.dest_ports.Intersect(b.dest_ports);
    if (out.source_ports.empty() || out.dest_ports.empty()) return std::nullopt;
  } else if (a.protocol == kProtoIcmp) {
    out.icmp_types = a.icmp_types.Intersect(b.icmp_types);
    if (out.icmp_types.empty()) return std::nullopt;
  }
  return out;
}

std::vector<OverlapReport> FindRuleOverlaps(std::span<const FlowRule> flows) {
  std::map<std::pair<std::string, std::string>, std::vector<const FlowRule*>>
      by_conduit;
  for (const FlowRule& f : flows) {
    by_conduit[{f.src_zone, f.dst_zone}].push_back(&f);
  }
  std::map<std::pair<std::string, std::string>, OverlapReport> reports;
  for (const auto& [zones, group] : by_conduit) {
    for (size_t i = 0; i < group.size(); ++i) {
      for (size_t j = i + 1; j < group.size(); ++j) {
        const FlowRule& a = *group[i];
        const FlowRule& b = *group[j];
        if (a.rule_name == b.rule_name) continue;
        std::optional<Service> common = ServiceIntersection(a.service, b.service);
        if (!common) continue;
        auto key = std::minmax(a.rule_name, b.rule_name);
        auto [it, inserted] = reports.try_emplace({key.first, key.second});
        OverlapReport& report = it->second;
        if (inserted) {
          report.kind = OverlapKind::kHighLevelOverlap;
          report.rule_a = key.first;
          report.rule_b = key.second;
          report.witness = common->ToPredicate();
        }
        report.shared.push_back({zones.first, zones.second, *common});
      }
    }
  }
  std::vector<OverlapReport> out;
  for (auto& [key, report] : reports) out.push_back(std::move(report));
  return out;
}

std::vector<OverlapReport> FindAclAnomalies(const Acl& acl) {
  std::vector<Box> boxes;
  for (const AclRule& rule : acl.rules) boxes.push_back(BoxOf(rule));
  std::vector<OverlapReport> out;
  for (size_t i = 0; i < acl.rules.size(); ++i) {
    if (boxes[i].Empty()) continue;
    std::vector<const Box*> permits, all;
    std::optional<size_t> first_overlap;
    for (size_t j = 0; j < i; ++j) {
      if (boxes[j].Intersect(boxes[i]).Empty()) continue;
      if (!first_overlap) first_overlap = j;
      all.push_back(&boxes[j]);
      if (acl.rules[j].action == AclAction::kPermit) permits.push_back(&boxes[j]);
    }
    if (!first_overlap) continue;
    OverlapKind kind;
    if (acl.rules[i].action == AclAction::kPermit &&
        CoveredBy(boxes[i], permits)) {
      kind = OverlapKind::kAclRedundancy;
    } else if (CoveredBy(boxes[i], all)) {
      kind = OverlapKind::kAclShadow;
    } else {
      continue;
    }
    OverlapReport report;
    report.kind = kind;
    report.rule_a = AclRuleName(acl, i);
    report.rule_b = AclRuleName(acl, *first_overlap);
    report.witness = WitnessOf(boxes[i].Intersect(boxes[*first_overlap]));
    out.push_back(std::move(report));
  }
  return out;
}

namespace {

// Elementary intervals cut at every boundary used by any service, so that
// overlap in Alloy reduces to shared atoms.
std::vector<Interval> Atoms(const std::vector<IntervalSet>& sets) {
  std::set<int64_t> cuts;
  for (const IntervalSet& s : sets) {
    for (const Interval& i : s) {
      cuts.insert(i.lo);
      cuts.insert(i.hi + 1);
    }
  }
  std::vector<Interval> out;
  for (auto it = cuts.begin(); it != cuts.end() && std::next(it) != cuts.end();
       ++it) {
    out.push_back({*it, *std::next(it) - 1});
  }
  return out;
}

std::string AtomSet(const IntervalSet& set, const std::vector<Interval>& atoms) {
  std::vector<std::string> names;
  for (const Interval& a : atoms) {
    if (set.Contains(IntervalSet({a}))) {
      names.push_back(absl::StrCat("\"", IntervalSet({a}).ToString(), "\""));
    }
  }
  if (names.empty()) return "none";
  return absl::StrJoin(names, " + ");
}

std::string AlloyIdent(std::string_view text) {
  std::string out;
  for (char c : text) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  }
  return out;
}

}  // namespace

std::string EmitAlloy(const PolicySpec& spec, std::span<const FlowRule> flows) {
  std::vector<Service> services;
  for (const FlowRule& f : flows) {
    if (std::none_of(services.begin(), services.end(),
                     [&](const Service& s) { return s == f.service; })) {
      services.push_back(f.service);
    }
  }
  std::vector<IntervalSet> sports, dports;
  for (const Service& s : services) {
    sports.push_back(s.source_ports);
    dports.push_back(s.dest_ports);
  }
  std::vector<Interval> sport_atoms = Atoms(sports);
  std::vector<Interval> dport_atoms = Atoms(dports);

  std::string out = absl::StrCat(
      "// Alloy model generated by forestfw from ", spec.file, "\n",
      "module forestfw_policy\n\n",
      "abstract sig Service {\n"
      "   ip_protocol: some Int,\n"
      "   source_port: set String,\n"
      "   dest_port: set String,\n"
      "   icmp_type: set Int }\n\n"
      "abstract sig PolicyRule {\n"
      "   zone1: one String,\n"
      "   zone2: one String,\n"
      "   operator: some Int,\n"
      "   service: one Service }\n\n"
      "one sig SecurityPolicy { rules: some PolicyRule }\n\n"
      "fact {\n"
      " all r: PolicyRule | r in SecurityPolicy.rules\n"
      " SecurityPolicy.rules = PolicyRule\n"
      " all s: Service | some r: PolicyRule | s in r.service }\n\n");

  std::map<std::string, std::string> service_sig;
  for (size_t i = 0; i < services.size(); ++i) {
    const Service& s = services[i];
    std::string sig = absl::StrCat("S", i + 1, "_", AlloyIdent(s.name));
    std::string icmp = "none";
    if (!s.icmp_types.empty()) {
      std::vector<std::string> types;
      for (const Interval& r : s.icmp_types) {
        for (int64_t t = r.lo; t <= r.hi; ++t) types.push_back(absl::StrCat(t));
      }
      icmp = absl::StrJoin(types, " + ");
    }
    absl::StrAppend(&out, "one sig ", sig, " extends Service {} {\n",
                    "   ip_protocol = ", s.protocol == kAnyProtocol ? 0 : s.protocol,
                    "\n   source_port = ", AtomSet(s.source_ports, sport_atoms),
                    "\n   dest_port = ", AtomSet(s.dest_ports, dport_atoms),
                    "\n   icmp_type = ", icmp, " }\n");
    service_sig[absl::StrCat(i)] = sig;
  }
  out += "\n";
  for (size_t i = 0; i < flows.size(); ++i) {
    const FlowRule& f = flows[i];
    size_t index = std::find(services.begin(), services.end(), f.service) -
                   services.begin();
    absl::StrAppend(&out, "one sig R", i + 1, "_", AlloyIdent(f.rule_name),
                    " extends PolicyRule {} {\n   zone1 = \"", f.src_zone,
                    "\"\n   zone2 = \"", f.dst_zone,
                    "\"\n   operator = 0\n   service = ",
                    service_sig[absl::StrCat(index)], " }\n");
  }
  absl::StrAppend(
      &out,
      "\npred service_overlap[a, b: Service] {\n"
      "   some a.ip_protocol & b.ip_protocol\n"
      "   (no a.source_port and no b.source_port) or some a.source_port & "
      "b.source_port\n"
      "   (no a.dest_port and no b.dest_port) or some a.dest_port & "
      "b.dest_port\n"
      "   (no a.icmp_type and no b.icmp_type) or some a.icmp_type & "
      "b.icmp_type }\n\n"
      "pred rule_overlap[a, b: PolicyRule] {\n"
      "   a.zone1 = b.zone1\n"
      "   a.zone2 = b.zone2\n"
      "   service_overlap[a.service, b.service] }\n\n"
      "assert no_rule_overlaps {\n"
      "   all disj a, b: PolicyRule | not rule_overlap[a, b] }\n\n"
      "check no_rule_overlaps for ", flows.size() + services.size() + 1,
      " but 10 Int\n");
  return out;
}

}  // namespace forestfw
