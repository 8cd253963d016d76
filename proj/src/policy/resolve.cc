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

// Name resolution: turns the syntax tree of a file (plus its imports) into
// a fully resolved PolicySpec.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "forestfw/policy_lang.h"
#include "src/policy/ast.h"

namespace forestfw {
namespace {

enum class DeclKind {
  kService,
  kServiceGroup,
  kPortGroup,
  kZoneGroup,
  kRule,
  kRuleGroup,
  kReporting,
  kPolicy,
};

std::string_view KindName(DeclKind kind) {
  switch (kind) {
    case DeclKind::kService:
      return "service";
    case DeclKind::kServiceGroup:
      return "service group";
    case DeclKind::kPortGroup:
      return "port group";
    case DeclKind::kZoneGroup:
      return "zone group";
    case DeclKind::kRule:
      return "policy rule";
    case DeclKind::kRuleGroup:
      return "rule group";
    case DeclKind::kReporting:
      return "reporting rule";
    case DeclKind::kPolicy:
      return "policy";
  }
  return "?";
}

absl::Status ErrorAt(const SourceLocation& loc, std::string_view message) {
  return absl::InvalidArgumentError(
      Diagnostic{Severity::kError, loc, std::string(message)}.ToString());
}

std::optional<int> ProtocolNumber(std::string_view name) {
  static const std::map<std::string, int, std::less<>> kProtocols = {
      {"icmp", 1},  {"igmp", 2},  {"tcp", 6},  {"udp", 17}, {"gre", 47},
      {"esp", 50},  {"ah", 51},   {"ospf", 89}, {"sctp", 132},
      {"ip", kAnyProtocol}};
  auto it = kProtocols.find(name);
  if (it == kProtocols.end()) return std::nullopt;
  return it->second;
}

// Evaluates `t0 op0 t1 op1 ...` where `^` and `\` bind tighter than `,`.
template <typename T, typename TermFn, typename UnionFn, typename InterFn,
          typename DiffFn>
absl::StatusOr<T> EvalSetExpr(const ast::SetExpr& expr, TermFn term,
                              UnionFn unite, InterFn intersect, DiffFn diff) {
  T acc{};
  if (expr.terms.empty()) return acc;
  absl::StatusOr<T> cur = term(expr.terms[0]);
  if (!cur.ok()) return cur.status();
  for (size_t i = 0; i < expr.ops.size(); ++i) {
    absl::StatusOr<T> next = term(expr.terms[i + 1]);
    if (!next.ok()) return next.status();
    switch (expr.ops[i]) {
      case TokenKind::kComma:
        acc = unite(acc, *cur);
        cur = *std::move(next);
        break;
      case TokenKind::kCaret:
        cur = intersect(*cur, *next);
        break;
      default:
        cur = diff(*cur, *next);
        break;
    }
  }
  return unite(acc, *cur);
}

using ZoneList = std::vector<std::string>;

ZoneList ZoneUnion(const ZoneList& a, const ZoneList& b) {
  ZoneList out = a;
  for (const std::string& z : b) {
    if (std::find(out.begin(), out.end(), z) == out.end()) out.push_back(z);
  }
  return out;
}
ZoneList ZoneIntersect(const ZoneList& a, const ZoneList& b) {
  ZoneList out;
  for (const std::string& z : a) {
    if (std::find(b.begin(), b.end(), z) != b.end()) out.push_back(z);
  }
  return out;
}
ZoneList ZoneDiff(const ZoneList& a, const ZoneList& b) {
  ZoneList out;
  for (const std::string& z : a) {
    if (std::find(b.begin(), b.end(), z) == b.end()) out.push_back(z);
  }
  return out;
}

class Resolver {
 public:
  Resolver(const ast::File& file, PolicySpec& spec,
           std::vector<std::string> namespaces)
      : file_(file), spec_(spec), namespaces_(std::move(namespaces)) {}

  absl::Status Run() {
    if (absl::Status s = IndexDeclarations(); !s.ok()) return s;
    for (const ast::ServiceDecl& decl : file_.services) {
      if (absl::Status s = ResolveService(decl.name.name).status(); !s.ok()) {
        return s;
      }
    }
    for (const ast::GroupDecl& decl : file_.port_groups) {
      if (absl::Status s = ResolvePortGroup(decl.name.name).status();
          !s.ok()) {
        return s;
      }
    }
    for (const ast::GroupDecl& decl : file_.service_groups) {
      if (absl::Status s = ResolveServiceGroup(decl.name.name).status();
          !s.ok()) {
        return s;
      }
    }
    for (const ast::GroupDecl& decl : file_.zone_groups) {
      if (absl::Status s = ResolveZoneGroup(decl.name.name).status();
          !s.ok()) {
        return s;
      }
    }
    for (const ast::RuleDecl& decl : file_.rules) {
      if (absl::Status s = ResolveRule(decl); !s.ok()) return s;
    }
    for (const ast::RuleGroupDecl& decl : file_.rule_groups) {
      if (absl::Status s = ResolveRuleGroup(decl); !s.ok()) return s;
    }
    for (const ast::ReportingDecl& decl : file_.reporting_rules) {
      if (absl::Status s = ResolveReporting(decl); !s.ok()) return s;
    }
    if (file_.policies.size() > 1) {
      return ErrorAt(file_.policies[1].name.location,
                     "more than one policy declared in a file");
    }
    for (const ast::PolicyDecl& decl : file_.policies) {
      if (absl::Status s = ResolvePolicy(decl); !s.ok()) return s;
    }
    return absl::OkStatus();
  }

 private:
  struct Entry {
    DeclKind kind;
    SourceLocation location;
    size_t index;
  };

  template <typename Decls>
  absl::Status Index(const Decls& decls, DeclKind kind) {
    for (size_t i = 0; i < decls.size(); ++i) {
      const ast::NameRef& name = decls[i].name;
      auto [it, inserted] =
          local_.emplace(name.name, Entry{kind, name.location, i});
      if (!inserted) {
        return ErrorAt(name.location,
                       absl::StrCat("duplicate declaration of '", name.name,
                                    "' (previously declared at line ",
                                    it->second.location.line, ")"));
      }
      spec_.locations[name.name] = name.location;
    }
    return absl::OkStatus();
  }

  absl::Status IndexDeclarations() {
    for (auto status :
         {Index(file_.services, DeclKind::kService),
          Index(file_.service_groups, DeclKind::kServiceGroup),
          Index(file_.port_groups, DeclKind::kPortGroup),
          Index(file_.zone_groups, DeclKind::kZoneGroup),
          Index(file_.rules, DeclKind::kRule),
          Index(file_.rule_groups, DeclKind::kRuleGroup),
          Index(file_.reporting_rules, DeclKind::kReporting),
          Index(file_.policies, DeclKind::kPolicy)}) {
      if (!status.ok()) return status;
    }
    return absl::OkStatus();
  }

  std::optional<DeclKind> ImportedKind(const std::string& qualified) const {
    if (spec_.services.contains(qualified)) return DeclKind::kService;
    if (spec_.service_groups.contains(qualified)) {
      return DeclKind::kServiceGroup;
    }
    if (spec_.port_groups.contains(qualified)) return DeclKind::kPortGroup;
    if (spec_.zone_groups.contains(qualified)) return DeclKind::kZoneGroup;
    if (spec_.rules.contains(qualified)) return DeclKind::kRule;
    if (spec_.rule_groups.contains(qualified)) return DeclKind::kRuleGroup;
    if (spec_.reporting_rules.contains(qualified)) {
      return DeclKind::kReporting;
    }
    return std::nullopt;
  }

  struct Lookup {
    std::string name;  // qualified key in spec_ maps
    DeclKind kind;
  };

  // Finds a declaration by the name as written. Returns nullopt when the
  // name is undeclared.
  absl::StatusOr<std::optional<Lookup>> Find(const std::string& name,
                                             const SourceLocation& loc) const {
    if (auto it = local_.find(name); it != local_.end()) {
      return Lookup{name, it->second.kind};
    }
    if (name.find('.') != std::string::npos) {
      if (std::optional<DeclKind> kind = ImportedKind(name)) {
        return Lookup{name, *kind};
      }
      return std::optional<Lookup>();
    }
    std::vector<Lookup> candidates;
    for (const std::string& ns : namespaces_) {
      std::string qualified = absl::StrCat(ns, ".", name);
      if (std::optional<DeclKind> kind = ImportedKind(qualified)) {
        candidates.push_back({qualified, *kind});
      }
    }
    if (candidates.size() > 1) {
      std::vector<std::string> names;
      for (const Lookup& c : candidates) names.push_back(c.name);
      return ErrorAt(loc, absl::StrCat("ambiguous name '", name, "': ",
                                       absl::StrJoin(names, ", ")));
    }
    if (candidates.empty()) return std::optional<Lookup>();
    return std::optional<Lookup>(candidates[0]);
  }

  absl::StatusOr<Lookup> Require(const std::string& name,
                                 const SourceLocation& loc) const {
    absl::StatusOr<std::optional<Lookup>> found = Find(name, loc);
    if (!found.ok()) return found.status();
    if (!found->has_value()) {
      return ErrorAt(loc, absl::StrCat("reference to undeclared name '", name,
                                       "'"));
    }
    return **found;
  }

  absl::Status WrongKind(const Lookup& found, const SourceLocation& loc,
                         std::string_view expected) const {
    return ErrorAt(loc, absl::StrCat("'", found.name, "' is a ",
                                     std::string(KindName(found.kind)),
                                     ", expected ", std::string(expected)));
  }

  absl::Status EnterCycleGuard(const std::string& name,
                               const SourceLocation& loc) {
    if (!in_progress_.insert(name).second) {
      return ErrorAt(loc, absl::StrCat("cycle in group nesting through '",
                                       name, "'"));
    }
    return absl::OkStatus();
  }

  // --- ports

  absl::StatusOr<IntervalSet> PortTerm(const ast::SetTerm& term) {
    if (term.range) return IntervalSet({*term.range});
    absl::StatusOr<Lookup> found = Require(term.name, term.location);
    if (!found.ok()) return found.status();
    if (found->kind != DeclKind::kPortGroup) {
      return WrongKind(*found, term.location, "a port group or port range");
    }
    return ResolvePortGroup(found->name, term.location);
  }

  absl::StatusOr<IntervalSet> EvalPorts(const ast::SetExpr& expr) {
    return EvalSetExpr<IntervalSet>(
        expr, [this](const ast::SetTerm& t) { return PortTerm(t); },
        [](const IntervalSet& a, const IntervalSet& b) { return a.Union(b); },
        [](const IntervalSet& a, const IntervalSet& b) {
          return a.Intersect(b);
        },
        [](const IntervalSet& a, const IntervalSet& b) {
          return a.Subtract(b);
        });
  }

  absl::StatusOr<IntervalSet> ResolvePortGroup(const std::string& name,
                                               SourceLocation use = {}) {
    if (auto it = spec_.port_groups.find(name); it != spec_.port_groups.end()) {
      return it->second;
    }
    const Entry& entry = local_.at(name);
    if (absl::Status s = EnterCycleGuard(name, use.line ? use : entry.location);
        !s.ok()) {
      return s;
    }
    absl::StatusOr<IntervalSet> ports =
        EvalPorts(file_.port_groups[entry.index].body);
    in_progress_.erase(name);
    if (!ports.ok()) return ports.status();
    spec_.port_groups[name] = *ports;
    return ports;
  }

  // Port attribute values: integers, ranges and port-group names.
  absl::StatusOr<IntervalSet> PortsFromValue(const Attr& attr) {
    IntervalSet out;
    for (const AttrScalar& item : attr.value->items) {
      switch (item.kind) {
        case AttrScalar::Kind::kInt:
        case AttrScalar::Kind::kRange:
          out = out.Union(IntervalSet::Of(item.lo, item.hi));
          break;
        case AttrScalar::Kind::kName: {
          ast::SetTerm term{item.text, std::nullopt, attr.location};
          absl::StatusOr<IntervalSet> group = PortTerm(term);
          if (!group.ok()) return group.status();
          out = out.Union(*group);
          break;
        }
        default:
          return ErrorAt(attr.location,
                         absl::StrCat("'", attr.key,
                                      "' expects ports, ranges or port "
                                      "groups"));
      }
    }
    if (attr.value->is_block || out.empty()) {
      return ErrorAt(attr.location,
                     absl::StrCat("'", attr.key, "' expects a port list"));
    }
    return out;
  }

  // --- services

  absl::StatusOr<Service> ResolveService(const std::string& name) {
    if (auto it = spec_.services.find(name); it != spec_.services.end()) {
      return it->second;
    }
    const ast::ServiceDecl& decl = file_.services[local_.at(name).index];
    Service service;
    service.name = name;
    const Attr* protocol_attr = nullptr;
    for (const Attr& attr : decl.attrs) {
      if (attr.key == "protocol") {
        if (protocol_attr != nullptr) {
          return ErrorAt(attr.location, "protocol given twice");
        }
        protocol_attr = &attr;
      }
    }
    if (protocol_attr == nullptr) {
      return ErrorAt(decl.name.location,
                     absl::StrCat("service '", name,
                                  "' has no protocol attribute"));
    }
    const std::vector<AttrScalar>& proto_items = protocol_attr->value->items;
    if (proto_items.size() != 1 || protocol_attr->value->is_block) {
      return ErrorAt(protocol_attr->location, "protocol takes one value");
    }
    const AttrScalar& proto = proto_items[0];
    if (proto.kind == AttrScalar::Kind::kInt) {
      if (proto.lo < 0 || proto.lo > kMaxProtocol) {
        return ErrorAt(protocol_attr->location,
                       absl::StrCat("protocol number ", proto.lo,
                                    " outside 0-255"));
      }
      service.protocol = static_cast<int>(proto.lo);
    } else if (proto.kind == AttrScalar::Kind::kName) {
      std::optional<int> number = ProtocolNumber(proto.text);
      if (!number) {
        return ErrorAt(protocol_attr->location,
                       absl::StrCat("unknown protocol '", proto.text, "'"));
      }
      service.protocol = *number;
    } else {
      return ErrorAt(protocol_attr->location,
                     "protocol must be a name or number");
    }

    std::string proto_prefix = ProtocolName(service.protocol);
    for (const Attr& attr : decl.attrs) {
      if (&attr == protocol_attr) continue;
      if (attr.key == "comment") {
        if (attr.value->items.size() != 1 ||
            attr.value->items[0].kind != AttrScalar::Kind::kString) {
          return ErrorAt(attr.location, "comment must be a quoted string");
        }
        service.comment = attr.value->items[0].text;
        continue;
      }
      std::vector<std::string> parts = absl::StrSplit(attr.key, '.');
      if (parts.size() != 2) {
        return ErrorAt(attr.location, absl::StrCat("unknown service attribute '",
                                                   attr.key, "'"));
      }
      const std::string& family = parts[0];
      const std::string& field = parts[1];
      bool port_family = family == "tcp" || family == "udp";
      if (port_family && (field == "source_port" || field == "dest_port")) {
        if (family != proto_prefix) {
          return ErrorAt(attr.location,
                         absl::StrCat("'", attr.key,
                                      "' does not apply to protocol ",
                                      proto_prefix));
        }
        absl::StatusOr<IntervalSet> ports = PortsFromValue(attr);
        if (!ports.ok()) return ports.status();
        (field == "source_port" ? service.source_ports : service.dest_ports) =
            *std::move(ports);
        continue;
      }
      if (family == "icmp" && (field == "type" || field == "icmp_type")) {
        if (service.protocol != kProtoIcmp) {
          return ErrorAt(attr.location,
                         "icmp.type only applies to protocol icmp");
        }
        absl::StatusOr<IntervalSet> types = PortsFromValue(attr);
        if (!types.ok()) return types.status();
        service.icmp_types = *std::move(types);
        continue;
      }
      return ErrorAt(attr.location,
                     absl::StrCat("unknown service attribute '", attr.key,
                                  "'"));
    }
    if (HasPorts(service.protocol)) {
      if (service.source_ports.empty()) {
        service.source_ports = IntervalSet::Of(0, kMaxPort);
      }
      if (service.dest_ports.empty()) {
        service.dest_ports = IntervalSet::Of(0, kMaxPort);
      }
    }
    if (service.protocol == kProtoIcmp && service.icmp_types.empty()) {
      service.icmp_types = IntervalSet::Of(0, kMaxIcmpType);
    }
    spec_.services[name] = service;
    return service;
  }

  absl::StatusOr<ServiceSet> ServiceTerm(const ast::SetTerm& term) {
    if (term.range) {
      return ErrorAt(term.location, "expected a service or service group");
    }
    absl::StatusOr<Lookup> found = Require(term.name, term.location);
    if (!found.ok()) return found.status();
    ServiceSet out;
    if (found->kind == DeclKind::kService) {
      absl::StatusOr<Service> service = ResolveService(found->name);
      if (!service.ok()) return service.status();
      out.Insert(*service);
      return out;
    }
    if (found->kind == DeclKind::kServiceGroup) {
      return ResolveServiceGroup(found->name, term.location);
    }
    return WrongKind(*found, term.location, "a service or service group");
  }

  absl::StatusOr<ServiceSet> EvalServices(const ast::SetExpr& expr) {
    return EvalSetExpr<ServiceSet>(
        expr, [this](const ast::SetTerm& t) { return ServiceTerm(t); },
        [](const ServiceSet& a, const ServiceSet& b) { return a.Union(b); },
        [](const ServiceSet& a, const ServiceSet& b) {
          return a.Intersect(b);
        },
        [](const ServiceSet& a, const ServiceSet& b) {
          return a.Difference(b);
        });
  }

  absl::StatusOr<ServiceSet> ResolveServiceGroup(const std::string& name,
                                                 SourceLocation use = {}) {
    if (auto it = spec_.service_groups.find(name);
        it != spec_.service_groups.end()) {
      return it->second;
    }
    const Entry& entry = local_.at(name);
    if (absl::Status s =
            EnterCycleGuard(name, use.line ? use : entry.location);
        !s.ok()) {
      return s;
    }
    absl::StatusOr<ServiceSet> members =
        EvalServices(file_.service_groups[entry.index].body);
    in_progress_.erase(name);
    if (!members.ok()) return members.status();
    spec_.service_groups[name] = *members;
    return members;
  }

  // --- zones

  absl::StatusOr<ZoneList> ZoneRef(const std::string& name,
                                   const SourceLocation& loc) {
    absl::StatusOr<std::optional<Lookup>> found = Find(name, loc);
    if (!found.ok()) return found.status();
    if (!found->has_value()) {
      if (name.find('.') != std::string::npos) {
        return ErrorAt(loc, absl::StrCat("reference to undeclared name '",
                                         name, "'"));
      }
      return ZoneList{name};
    }
    const Lookup& hit = **found;
    if (hit.kind != DeclKind::kZoneGroup) {
      return WrongKind(hit, loc, "a zone or zone group");
    }
    return ResolveZoneGroup(hit.name, loc);
  }

  absl::StatusOr<ZoneList> ResolveZoneGroup(const std::string& name,
                                            SourceLocation use = {}) {
    if (auto it = spec_.zone_groups.find(name); it != spec_.zone_groups.end()) {
      return it->second.zones;
    }
    const Entry& entry = local_.at(name);
    if (absl::Status s =
            EnterCycleGuard(name, use.line ? use : entry.location);
        !s.ok()) {
      return s;
    }
    absl::StatusOr<ZoneList> zones = EvalSetExpr<ZoneList>(
        file_.zone_groups[entry.index].body,
        [this](const ast::SetTerm& t) -> absl::StatusOr<ZoneList> {
          if (t.range) return ErrorAt(t.location, "expected a zone name");
          return ZoneRef(t.name, t.location);
        },
        ZoneUnion, ZoneIntersect, ZoneDiff);
    in_progress_.erase(name);
    if (!zones.ok()) return zones.status();
    spec_.zone_groups[name] = ZoneGroup{name, *zones};
    return zones;
  }

  // --- rules and policy objects

  absl::Status ResolveRule(const ast::RuleDecl& decl) {
    HighLevelRule rule;
    rule.name = decl.name.name;
    rule.left = decl.left.name;
    rule.right = decl.right.name;
    rule.op = decl.op;
    absl::StatusOr<ZoneList> left = ZoneRef(decl.left.name, decl.left.location);
    if (!left.ok()) return left.status();
    absl::StatusOr<ZoneList> right =
        ZoneRef(decl.right.name, decl.right.location);
    if (!right.ok()) return right.status();
    absl::StatusOr<ServiceSet> services = EvalServices(decl.services);
    if (!services.ok()) return services.status();
    rule.left_zones = *std::move(left);
    rule.right_zones = *std::move(right);
    rule.services = *std::move(services);
    spec_.rules[rule.name] = std::move(rule);
    return absl::OkStatus();
  }

  absl::Status ResolveRuleGroup(const ast::RuleGroupDecl& decl) {
    std::vector<std::string> members;
    for (const ast::NameRef& member : decl.members) {
      absl::StatusOr<Lookup> found = Require(member.name, member.location);
      if (!found.ok()) return found.status();
      if (found->kind == DeclKind::kRule) {
        if (std::find(members.begin(), members.end(), found->name) ==
            members.end()) {
          members.push_back(found->name);
        }
      } else if (found->kind == DeclKind::kRuleGroup) {
        // Nested rule groups are flattened; they must be declared earlier.
        auto it = spec_.rule_groups.find(found->name);
        if (it == spec_.rule_groups.end()) {
          return ErrorAt(member.location,
                         absl::StrCat("rule group '", member.name,
                                      "' must be declared before use"));
        }
        for (const std::string& r : it->second) {
          if (std::find(members.begin(), members.end(), r) == members.end()) {
            members.push_back(r);
          }
        }
      } else {
        return WrongKind(*found, member.location, "a policy rule");
      }
    }
    spec_.rule_groups[decl.name.name] = std::move(members);
    return absl::OkStatus();
  }

  absl::Status CheckGranularityRefs(const AttrValue& value,
                                    const SourceLocation& loc) {
    for (const Attr& attr : value.attrs) {
      if (attr.key == "zone_or_group" || attr.key == "rule_or_group") {
        for (const std::string& name : attr.value->Names()) {
          absl::StatusOr<std::optional<Lookup>> found = Find(name, loc);
          if (!found.ok()) return found.status();
          bool zone_ref = attr.key == "zone_or_group";
          if (!found->has_value()) {
            return ErrorAt(attr.location,
                           absl::StrCat("reporting reference to undeclared ",
                                        zone_ref ? "zone group" : "rule group",
                                        " '", name, "'"));
          }
          DeclKind kind = (*found)->kind;
          bool ok = zone_ref ? kind == DeclKind::kZoneGroup
                             : (kind == DeclKind::kRuleGroup ||
                                kind == DeclKind::kRule);
          if (!ok) {
            return WrongKind(**found, attr.location,
                             zone_ref ? "a zone group" : "a rule group");
          }
        }
      }
      if (absl::Status s = CheckGranularityRefs(*attr.value, attr.location);
          !s.ok()) {
        return s;
      }
    }
    for (const AttrScalar& item : value.items) {
      if (item.nested) {
        if (absl::Status s = CheckGranularityRefs(*item.nested, loc);
            !s.ok()) {
          return s;
        }
      }
    }
    return absl::OkStatus();
  }

  absl::Status ResolveReporting(const ast::ReportingDecl& decl) {
    static const std::set<std::string, std::less<>> kDimensions = {
        "network", "policy", "traffic", "temporal", "performance"};
    ReportingRule rule;
    rule.name = decl.name.name;
    for (const Attr& attr : decl.attrs) {
      if (attr.key == "use_case") {
        if (attr.value->items.size() != 1 ||
            attr.value->items[0].kind != AttrScalar::Kind::kName) {
          return ErrorAt(attr.location, "use_case takes a single name");
        }
        rule.use_case = attr.value->items[0].text;
        continue;
      }
      if (attr.key.starts_with("granularity.")) {
        std::string dimension = attr.key.substr(12);
        if (!kDimensions.contains(dimension)) {
          return ErrorAt(attr.location,
                         absl::StrCat("unknown granularity dimension '",
                                      dimension, "'"));
        }
        if (absl::Status s = CheckGranularityRefs(*attr.value, attr.location);
            !s.ok()) {
          return s;
        }
        rule.granularity[dimension] = *attr.value;
        continue;
      }
      return ErrorAt(attr.location, absl::StrCat("unknown reporting attribute '",
                                                 attr.key, "'"));
    }
    if (rule.use_case.empty()) {
      return ErrorAt(decl.name.location,
                     absl::StrCat("reporting rule '", rule.name,
                                  "' has no use_case"));
    }
    spec_.reporting_rules[rule.name] = std::move(rule);
    return absl::OkStatus();
  }

  absl::Status ResolvePolicy(const ast::PolicyDecl& decl) {
    absl::StatusOr<Lookup> rules =
        Require(decl.rule_group.name, decl.rule_group.location);
    if (!rules.ok()) return rules.status();
    if (rules->kind != DeclKind::kRuleGroup) {
      return WrongKind(*rules, decl.rule_group.location, "a rule group");
    }
    absl::StatusOr<Lookup> reporting =
        Require(decl.reporting_rule.name, decl.reporting_rule.location);
    if (!reporting.ok()) return reporting.status();
    if (reporting->kind != DeclKind::kReporting) {
      return WrongKind(*reporting, decl.reporting_rule.location,
                       "a reporting rule");
    }
    spec_.global_policy =
        GlobalPolicy{decl.name.name, rules->name, reporting->name};
    return absl::OkStatus();
  }

  const ast::File& file_;
  PolicySpec& spec_;
  std::vector<std::string> namespaces_;
  std::map<std::string, Entry> local_;
  std::set<std::string> in_progress_;
};

std::string Qualify(const std::string& ns, const std::string& name) {
  return absl::StrCat(ns, ".", name);
}

bool IsLocal(const std::string& name) {
  return name.find('.') == std::string::npos;
}

// Copies the local declarations of an imported library into `spec` under
// `ns.`.
void MergeImported(const PolicySpec& lib, const std::string& ns,
                   PolicySpec& spec) {
  auto qualify_list = [&](const std::vector<std::string>& names) {
    std::vector<std::string> out;
    for (const std::string& n : names) {
      out.push_back(IsLocal(n) ? Qualify(ns, n) : n);
    }
    return out;
  };
  auto qualify_service = [&](Service service) {
    if (IsLocal(service.name)) service.name = Qualify(ns, service.name);
    return service;
  };
  for (const auto& [name, service] : lib.services) {
    if (IsLocal(name)) {
      spec.services[Qualify(ns, name)] = qualify_service(service);
    }
  }
  auto qualify_set = [&](const ServiceSet& set) {
    ServiceSet out;
    for (const Service& s : set) out.Insert(qualify_service(s));
    return out;
  };
  for (const auto& [name, group] : lib.service_groups) {
    if (IsLocal(name)) {
      spec.service_groups[Qualify(ns, name)] = qualify_set(group);
    }
  }
  for (const auto& [name, ports] : lib.port_groups) {
    if (IsLocal(name)) spec.port_groups[Qualify(ns, name)] = ports;
  }
  for (const auto& [name, group] : lib.zone_groups) {
    if (!IsLocal(name)) continue;
    ZoneGroup copy = group;
    copy.name = Qualify(ns, name);
    spec.zone_groups[copy.name] = std::move(copy);
  }
  for (const auto& [name, rule] : lib.rules) {
    if (!IsLocal(name)) continue;
    HighLevelRule copy = rule;
    copy.name = Qualify(ns, name);
    copy.services = qualify_set(rule.services);
    spec.rules[copy.name] = std::move(copy);
  }
  for (const auto& [name, members] : lib.rule_groups) {
    if (IsLocal(name)) spec.rule_groups[Qualify(ns, name)] = qualify_list(members);
  }
  for (const auto& [name, rule] : lib.reporting_rules) {
    if (!IsLocal(name)) continue;
    ReportingRule copy = rule;
    copy.name = Qualify(ns, name);
    spec.reporting_rules[copy.name] = std::move(copy);
  }
}

absl::StatusOr<PolicySpec> ParseWithStack(std::string_view text,
                                          const Importer& importer,
                                          std::string_view file,
                                          std::vector<std::string>& stack) {
  absl::StatusOr<ast::File> parsed = ast::ParseFile(text, file);
  if (!parsed.ok()) return parsed.status();

  PolicySpec spec;
  spec.file = std::string(file);
  if (parsed->model) spec.declared_model = parsed->model->name;

  std::vector<std::string> namespaces;
  for (const ast::NameRef& import : parsed->imports) {
    if (std::find(spec.imports.begin(), spec.imports.end(), import.name) !=
        spec.imports.end()) {
      continue;
    }
    if (std::find(stack.begin(), stack.end(), import.name) != stack.end()) {
      return ErrorAt(import.location,
                     absl::StrCat("import cycle through '", import.name, "'"));
    }
    if (!importer) {
      return ErrorAt(import.location, absl::StrCat("unresolved import '",
                                                   import.name, "'"));
    }
    absl::StatusOr<std::string> source = importer(import.name);
    if (!source.ok()) {
      return ErrorAt(import.location,
                     absl::StrCat("unresolved import '", import.name,
                                  "': ", source.status().message()));
    }
    stack.push_back(import.name);
    absl::StatusOr<PolicySpec> lib =
        ParseWithStack(*source, importer, import.name, stack);
    stack.pop_back();
    if (!lib.ok()) return lib.status();
    std::string ns = import.name.substr(import.name.rfind('.') + 1);
    if (std::find(namespaces.begin(), namespaces.end(), ns) !=
        namespaces.end()) {
      return ErrorAt(import.location,
                     absl::StrCat("two imports bind namespace '", ns, "'"));
    }
    namespaces.push_back(ns);
    MergeImported(*lib, ns, spec);
    spec.imports.push_back(import.name);
  }

  Resolver resolver(*parsed, spec, namespaces);
  if (absl::Status s = resolver.Run(); !s.ok()) return s;
  return spec;
}

}  // namespace

absl::StatusOr<PolicySpec> ParsePolicy(std::string_view text,
                                       const Importer& importer,
                                       std::string_view file) {
  std::vector<std::string> stack;
  return ParseWithStack(text, importer, file, stack);
}

absl::StatusOr<ServiceSet> ResolveServiceExpr(std::string_view expr,
                                              const PolicySpec& env) {
  absl::StatusOr<ast::SetExpr> parsed = ast::ParseSetExpr(expr);
  if (!parsed.ok()) return parsed.status();
  std::set<std::string> namespaces;
  for (const std::string& import : env.imports) {
    namespaces.insert(import.substr(import.rfind('.') + 1));
  }
  auto term = [&](const ast::SetTerm& t) -> absl::StatusOr<ServiceSet> {
    if (t.range) {
      return absl::InvalidArgumentError("expected a service or service group");
    }
    std::vector<std::string> candidates = {t.name};
    if (IsLocal(t.name) && !env.services.contains(t.name) &&
        !env.service_groups.contains(t.name)) {
      candidates.clear();
      for (const std::string& ns : namespaces) {
        candidates.push_back(Qualify(ns, t.name));
      }
    }
    std::vector<ServiceSet> hits;
    for (const std::string& name : candidates) {
      if (auto it = env.services.find(name); it != env.services.end()) {
        ServiceSet one;
        one.Insert(it->second);
        hits.push_back(std::move(one));
      } else if (auto git = env.service_groups.find(name);
                 git != env.service_groups.end()) {
        hits.push_back(git->second);
      }
    }
    if (hits.empty()) {
      return absl::NotFoundError(
          absl::StrCat("reference to undeclared name '", t.name, "'"));
    }
    if (hits.size() > 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("ambiguous name '", t.name, "'"));
    }
    return hits[0];
  };
  return EvalSetExpr<ServiceSet>(
      *parsed, term,
      [](const ServiceSet& a, const ServiceSet& b) { return a.Union(b); },
      [](const ServiceSet& a, const ServiceSet& b) { return a.Intersect(b); },
      [](const ServiceSet& a, const ServiceSet& b) {
        return a.Difference(b);
      });
}

}  // namespace forestfw
