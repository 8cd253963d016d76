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

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "forestfw/policy_lang.h"

namespace forestfw {

std::string ProtocolName(int protocol) {
  switch (protocol) {
    case kProtoIcmp:
      return "icmp";
    case kProtoTcp:
      return "tcp";
    case kProtoUdp:
      return "udp";
    case kProtoOspf:
      return "ospf";
    case kAnyProtocol:
      return "ip";
    default:
      return absl::StrCat(protocol);
  }
}

bool Service::SameValue(const Service& other) const {
  return protocol == other.protocol && source_ports == other.source_ports &&
         dest_ports == other.dest_ports && icmp_types == other.icmp_types;
}

Predicate Service::ToPredicate() const {
  if (protocol == kAnyProtocol) return Predicate::Full();
  return Predicate::ForProtocol(protocol, source_ports, dest_ports,
                               icmp_types);
}

std::string Service::Describe() const {
  std::string out = absl::StrCat("protocol=", protocol);
  if (HasPorts(protocol)) {
    absl::StrAppend(&out, " sport=", source_ports.ToString(),
                    " dport=", dest_ports.ToString());
  }
  if (protocol == kProtoIcmp) {
    absl::StrAppend(&out, " icmp_type=", icmp_types.ToString());
  }
  return out;
}

void ServiceSet::Insert(const Service& service) {
  if (!ContainsValue(service)) members_.push_back(service);
}

bool ServiceSet::ContainsValue(const Service& service) const {
  return std::any_of(members_.begin(), members_.end(),
                     [&](const Service& m) { return m.SameValue(service); });
}

ServiceSet ServiceSet::Union(const ServiceSet& other) const {
  ServiceSet out = *this;
  for (const Service& s : other.members_) out.Insert(s);
  return out;
}

ServiceSet ServiceSet::Intersect(const ServiceSet& other) const {
  ServiceSet out;
  for (const Service& s : members_) {
    if (other.ContainsValue(s)) out.Insert(s);
  }
  return out;
}

ServiceSet ServiceSet::Difference(const ServiceSet& other) const {
  ServiceSet out;
  for (const Service& s : members_) {
    if (!other.ContainsValue(s)) out.Insert(s);
  }
  return out;
}

bool operator==(const AttrScalar& a, const AttrScalar& b) {
  if (a.kind != b.kind || a.lo != b.lo || a.hi != b.hi || a.text != b.text) {
    return false;
  }
  if (!a.nested || !b.nested) return !a.nested && !b.nested;
  return *a.nested == *b.nested;
}

bool operator==(const Attr& a, const Attr& b) {
  if (a.key != b.key) return false;
  if (!a.value || !b.value) return !a.value && !b.value;
  return *a.value == *b.value;
}

std::vector<std::string> AttrValue::Names() const {
  std::vector<std::string> out;
  for (const AttrScalar& item : items) {
    if (item.kind == AttrScalar::Kind::kName) out.push_back(item.text);
    if (item.nested) {
      std::vector<std::string> inner = item.nested->Names();
      out.insert(out.end(), inner.begin(), inner.end());
    }
  }
  for (const Attr& attr : attrs) {
    if (!attr.value) continue;
    std::vector<std::string> inner = attr.value->Names();
    out.insert(out.end(), inner.begin(), inner.end());
  }
  return out;
}

namespace {

void CollectUnder(const AttrValue& value, std::string_view key,
                  std::vector<std::string>& out) {
  for (const Attr& attr : value.attrs) {
    if (!attr.value) continue;
    if (attr.key == key) {
      for (std::string& name : attr.value->Names()) {
        if (std::find(out.begin(), out.end(), name) == out.end()) {
          out.push_back(std::move(name));
        }
      }
    }
    CollectUnder(*attr.value, key, out);
  }
  for (const AttrScalar& item : value.items) {
    if (item.nested) CollectUnder(*item.nested, key, out);
  }
}

}  // namespace

std::vector<std::string> ReportingRule::ReferencedZoneGroups() const {
  std::vector<std::string> out;
  for (const auto& [dimension, value] : granularity) {
    CollectUnder(value, "zone_or_group", out);
  }
  return out;
}

std::vector<std::string> ReportingRule::ReferencedRuleGroups() const {
  std::vector<std::string> out;
  for (const auto& [dimension, value] : granularity) {
    CollectUnder(value, "rule_or_group", out);
  }
  return out;
}

SourceLocation PolicySpec::LocationOf(std::string_view name) const {
  auto it = locations.find(std::string(name));
  if (it != locations.end()) return it->second;
  return SourceLocation{file, 0, 0};
}

std::set<std::string> PolicySpec::ReferencedZones() const {
  std::set<std::string> out;
  for (const auto& [name, group] : zone_groups) {
    if (name.find('.') != std::string::npos) continue;
    out.insert(group.zones.begin(), group.zones.end());
  }
  for (const auto& [name, rule] : rules) {
    if (name.find('.') != std::string::npos) continue;
    out.insert(rule.left_zones.begin(), rule.left_zones.end());
    out.insert(rule.right_zones.begin(), rule.right_zones.end());
  }
  return out;
}

bool PolicySpec::SameAs(const PolicySpec& other) const {
  return imports == other.imports && declared_model == other.declared_model &&
         services == other.services &&
         service_groups == other.service_groups &&
         port_groups == other.port_groups &&
         zone_groups == other.zone_groups && rules == other.rules &&
         rule_groups == other.rule_groups &&
         reporting_rules == other.reporting_rules &&
         global_policy == other.global_policy;
}

}  // namespace forestfw
