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
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "forestfw/policy_lang.h"

namespace forestfw {
namespace {

std::vector<std::string> Sorted(std::vector<std::string> zones) {
  std::sort(zones.begin(), zones.end());
  return zones;
}

void ExpandDirection(const HighLevelRule& rule,
                     const std::vector<std::string>& from,
                     const std::vector<std::string>& to,
                     std::vector<FlowRule>& out) {
  for (const std::string& src : Sorted(from)) {
    for (const std::string& dst : Sorted(to)) {
      if (src == dst) continue;
      for (const Service& service : rule.services) {
        out.push_back(FlowRule{rule.name, src, dst, service});
      }
    }
  }
}

}  // namespace

absl::StatusOr<std::vector<FlowRule>> ExpandRuleGroup(
    const PolicySpec& spec, std::string_view rule_group) {
  auto group = spec.rule_groups.find(std::string(rule_group));
  if (group == spec.rule_groups.end()) {
    return absl::NotFoundError(
        absl::StrCat("unknown rule group '", std::string(rule_group), "'"));
  }
  std::vector<FlowRule> out;
  for (const std::string& rule_name : group->second) {
    const HighLevelRule& rule = spec.rules.at(rule_name);
    SourceLocation loc = spec.LocationOf(rule_name);
    if (rule.left_zones.empty() || rule.right_zones.empty()) {
      return absl::InvalidArgumentError(
          MakeError(loc, absl::StrCat("rule '", rule_name,
                                      "' references an empty zone group"))
              .ToString());
    }
    if (rule.services.empty()) {
      return absl::InvalidArgumentError(
          MakeError(loc, absl::StrCat("rule '", rule_name,
                                      "' references an empty service set"))
              .ToString());
    }
    ExpandDirection(rule, rule.left_zones, rule.right_zones, out);
    if (rule.op == RuleOperator::kBidirectional) {
      ExpandDirection(rule, rule.right_zones, rule.left_zones, out);
    }
  }
  return out;
}

absl::StatusOr<std::vector<FlowRule>> ExpandRules(const PolicySpec& spec) {
  if (!spec.global_policy) {
    return absl::FailedPreconditionError(
        MakeError(SourceLocation{spec.file, 0, 0}, "no policy declared")
            .ToString());
  }
  return ExpandRuleGroup(spec, spec.global_policy->rule_group);
}

}  // namespace forestfw
