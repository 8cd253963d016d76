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
#include "absl/strings/str_join.h"
#include "forestfw/policy_lang.h"

namespace forestfw {
namespace {

bool IsLocal(const std::string& name) {
  return name.find('.') == std::string::npos;
}

void CheckRange(const PolicySpec& spec, const std::string& owner,
                const std::string& what, const IntervalSet& values, int64_t max,
                std::vector<Diagnostic>& out) {
  if (values.empty()) return;
  if (values.Min() < 0 || values.Max() > max) {
    out.push_back(MakeError(
        spec.LocationOf(owner),
        absl::StrCat(what, " value out of range 0-", max, " in '", owner,
                     "': ", values.ToString())));
  }
}

}  // namespace

std::vector<Diagnostic> ValidateSpec(const PolicySpec& spec) {
  std::vector<Diagnostic> out;

  for (const auto& [name, ports] : spec.port_groups) {
    if (IsLocal(name)) CheckRange(spec, name, "port", ports, kMaxPort, out);
  }

  for (const auto& [name, service] : spec.services) {
    if (!IsLocal(name)) continue;
    CheckRange(spec, name, "port", service.source_ports, kMaxPort, out);
    CheckRange(spec, name, "port", service.dest_ports, kMaxPort, out);
    CheckRange(spec, name, "icmp type", service.icmp_types, kMaxIcmpType,
               out);
    const IntervalSet full = IntervalSet::Of(0, kMaxPort);
    if (service.protocol == kAnyProtocol) {
      out.push_back(MakeError(
          spec.LocationOf(name),
          absl::StrCat("generic service all-IP prohibited: '", name, "'")));
    } else if (HasPorts(service.protocol) && service.source_ports == full &&
               service.dest_ports == full) {
      out.push_back(MakeError(
          spec.LocationOf(name),
          absl::StrCat("generic service all-",
                       service.protocol == kProtoTcp ? "TCP" : "UDP",
                       " prohibited: '", name, "'")));
    }
  }

  // Zone groups whose member sets coincide.
  std::vector<std::pair<std::string, std::set<std::string>>> seen;
  for (const auto& [name, group] : spec.zone_groups) {
    if (!IsLocal(name)) continue;
    std::set<std::string> members(group.zones.begin(), group.zones.end());
    for (const auto& [other, other_members] : seen) {
      if (other_members == members) {
        out.push_back(MakeWarning(
            spec.LocationOf(name),
            absl::StrCat("zone group '", name, "' duplicates '", other,
                         "' {", absl::StrJoin(members, ", "), "}")));
        break;
      }
    }
    seen.emplace_back(name, std::move(members));
  }

  for (const auto& [name, rule] : spec.rules) {
    if (!IsLocal(name)) continue;
    std::vector<std::string> common;
    for (const std::string& z : rule.left_zones) {
      if (std::find(rule.right_zones.begin(), rule.right_zones.end(), z) !=
          rule.right_zones.end()) {
        common.push_back(z);
      }
    }
    if (!common.empty()) {
      out.push_back(MakeError(
          spec.LocationOf(name),
          absl::StrCat("rule '", name, "' has overlapping end zones: ",
                       absl::StrJoin(common, ", "))));
    }
    if (rule.left_zones.empty() || rule.right_zones.empty()) {
      out.push_back(MakeError(
          spec.LocationOf(name),
          absl::StrCat("rule '", name, "' references an empty zone group")));
    }
    if (rule.services.empty()) {
      out.push_back(MakeError(
          spec.LocationOf(name),
          absl::StrCat("rule '", name, "' references an empty service set")));
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     return a.location.line < b.location.line;
                   });
  return out;
}

}  // namespace forestfw
