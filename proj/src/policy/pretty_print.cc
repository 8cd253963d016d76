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

#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "forestfw/policy_lang.h"

namespace forestfw {
namespace {

bool IsLocal(const std::string& name) {
  return name.find('.') == std::string::npos;
}

std::string Ranges(const IntervalSet& set) {
  std::vector<std::string> parts;
  for (const Interval& i : set) {
    parts.push_back(i.lo == i.hi ? absl::StrCat(i.lo)
                                 : absl::StrCat(i.lo, "-", i.hi));
  }
  return absl::StrJoin(parts, ", ");
}

std::string Quote(const std::string& text) {
  if (text.find('"') == std::string::npos) return absl::StrCat("\"", text, "\"");
  return absl::StrCat("``", text, "''");
}

std::string ValueText(const AttrValue& value);

std::string ScalarText(const AttrScalar& s) {
  switch (s.kind) {
    case AttrScalar::Kind::kInt:
      return absl::StrCat(s.lo);
    case AttrScalar::Kind::kRange:
      return absl::StrCat(s.lo, "-", s.hi);
    case AttrScalar::Kind::kString:
      return Quote(s.text);
    case AttrScalar::Kind::kNested:
      return s.nested ? ValueText(*s.nested) : "{}";
    case AttrScalar::Kind::kName:
      break;
  }
  return s.text;
}

std::string ValueText(const AttrValue& value) {
  if (value.is_block) {
    std::string out = "{";
    for (const Attr& attr : value.attrs) {
      absl::StrAppend(&out, attr.key, "=",
                      attr.value ? ValueText(*attr.value) : "{}", "; ");
    }
    absl::StrAppend(&out, "}");
    return out;
  }
  std::vector<std::string> items;
  for (const AttrScalar& s : value.items) items.push_back(ScalarText(s));
  return absl::StrCat("{", absl::StrJoin(items, ", "), "}");
}

std::string ServiceNames(const ServiceSet& set) {
  std::vector<std::string> names;
  for (const Service& s : set) names.push_back(s.name);
  return absl::StrJoin(names, ", ");
}

}  // namespace

std::string PrettyPrint(const PolicySpec& spec) {
  std::string out;
  for (const std::string& import : spec.imports) {
    absl::StrAppend(&out, "import ", import, ";\n");
  }
  if (spec.declared_model) {
    absl::StrAppend(&out, "load_zone_conduit_model ",
                    Quote(*spec.declared_model), "\n");
  }
  if (!out.empty()) out += "\n";

  for (const auto& [name, ports] : spec.port_groups) {
    if (!IsLocal(name)) continue;
    absl::StrAppend(&out, "port_group ", name, " { ", Ranges(ports), " }\n");
  }
  const IntervalSet full = IntervalSet::Of(0, kMaxPort);
  for (const auto& [name, s] : spec.services) {
    if (!IsLocal(name)) continue;
    absl::StrAppend(&out, "service ", name, " { protocol=",
                    ProtocolName(s.protocol), ";");
    std::string family = ProtocolName(s.protocol);
    if (HasPorts(s.protocol)) {
      if (s.source_ports != full) {
        absl::StrAppend(&out, " ", family, ".source_port=",
                        Ranges(s.source_ports), ";");
      }
      if (s.dest_ports != full) {
        absl::StrAppend(&out, " ", family, ".dest_port=", Ranges(s.dest_ports),
                        ";");
      }
    }
    if (s.protocol == kProtoIcmp &&
        s.icmp_types != IntervalSet::Of(0, kMaxIcmpType)) {
      absl::StrAppend(&out, " icmp.type=", Ranges(s.icmp_types), ";");
    }
    if (!s.comment.empty()) {
      absl::StrAppend(&out, " comment=", Quote(s.comment), ";");
    }
    out += " }\n";
  }
  for (const auto& [name, group] : spec.service_groups) {
    if (!IsLocal(name)) continue;
    absl::StrAppend(&out, "service_group ", name, " { ", ServiceNames(group),
                    " }\n");
  }
  for (const auto& [name, group] : spec.zone_groups) {
    if (!IsLocal(name)) continue;
    absl::StrAppend(&out, "zone_group ", name, " { ",
                    absl::StrJoin(group.zones, ", "), " }\n");
  }
  for (const auto& [name, rule] : spec.rules) {
    if (!IsLocal(name)) continue;
    absl::StrAppend(
        &out, "policy_rule ", name, " { ", rule.left,
        rule.op == RuleOperator::kBidirectional ? " <-> " : " -> ",
        rule.right, " : ", ServiceNames(rule.services), " }\n");
  }
  for (const auto& [name, members] : spec.rule_groups) {
    if (!IsLocal(name)) continue;
    absl::StrAppend(&out, "rule_group ", name, " { ",
                    absl::StrJoin(members, ", "), " }\n");
  }
  for (const auto& [name, rule] : spec.reporting_rules) {
    if (!IsLocal(name)) continue;
    absl::StrAppend(&out, "reporting_rule ", name, " {\n  use_case=",
                    rule.use_case, ";\n");
    for (const auto& [dimension, value] : rule.granularity) {
      absl::StrAppend(&out, "  granularity.", dimension, "=", ValueText(value),
                      ";\n");
    }
    out += "}\n";
  }
  if (spec.global_policy) {
    absl::StrAppend(&out, "policy ", spec.global_policy->name, " { ",
                    spec.global_policy->rule_group, "; ",
                    spec.global_policy->reporting_rule, "; }\n");
  }
  return out;
}

}  // namespace forestfw
