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

// Overlap and anomaly detection with concrete witnesses, for expanded
// high-level flows and for network-level ACLs.

#ifndef FORESTFW_CHECKER_H_
#define FORESTFW_CHECKER_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forestfw/acl.h"
#include "forestfw/header_space.h"
#include "forestfw/policy_lang.h"

namespace forestfw {

enum class OverlapKind { kHighLevelOverlap, kAclRedundancy, kAclShadow };

std::string_view OverlapKindName(OverlapKind kind);

struct OverlapReport {
  OverlapKind kind = OverlapKind::kHighLevelOverlap;
  std::string rule_a;
  std::string rule_b;
  // One shared region; matched by both rules.
  Predicate witness;
  // High-level reports: every (src zone, dst zone, shared service) found
  // between the two rules.
  struct Shared {
    std::string src_zone;
    std::string dst_zone;
    Service service;
  };
  std::vector<Shared> shared;

  std::string Message() const;
};

std::optional<Service> ServiceIntersection(const Service& a, const Service& b);

// One report per pair of distinct high-level rules that share a zone pair
// and some service region. Reports are ordered by (rule_a, rule_b) with
// rule_a < rule_b.
std::vector<OverlapReport> FindRuleOverlaps(std::span<const FlowRule> flows);

// Redundant permits (covered by earlier permits) and shadowed rules
// (covered by earlier rules of any action). Connection state is treated as
// a seventh dimension.
std::vector<OverlapReport> FindAclAnomalies(const Acl& acl);

// Alloy model of the expanded policy: Service, PolicyRule and
// SecurityPolicy signatures, the global facts and a no_rule_overlaps check.
std::string EmitAlloy(const PolicySpec& spec, std::span<const FlowRule> flows);

}  // namespace forestfw

#endif  // FORESTFW_CHECKER_H_
