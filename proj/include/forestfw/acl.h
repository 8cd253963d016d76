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

// Network-level access-control lists: the vendor-neutral rule form that the
// compiler emits and the simulator evaluates.

#ifndef FORESTFW_ACL_H_
#define FORESTFW_ACL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forestfw/header_space.h"
#include "forestfw/interval_set.h"

namespace forestfw {

// Value of protocol for rules matching every IP protocol.
inline constexpr int kIpWildcard = 256;

enum class ConnState : uint8_t { kNew = 1, kEstablished = 2 };

// Bit set over ConnState. Zero means the rule ignores connection state.
using StateMask = uint8_t;
inline constexpr StateMask kStateAny = 0;
inline constexpr StateMask kStateNew = 1;
inline constexpr StateMask kStateEstablished = 2;

inline bool StateMatches(StateMask mask, ConnState state) {
  return mask == kStateAny || (mask & static_cast<uint8_t>(state)) != 0;
}

enum class AclAction { kPermit, kDeny };

struct AclRule {
  AclAction action = AclAction::kPermit;
  int protocol = kIpWildcard;
  Cidr src;  // 0.0.0.0/0 for any
  Cidr dst;
  IntervalSet sport;       // TCP/UDP only
  IntervalSet dport;       // TCP/UDP only
  IntervalSet icmp_types;  // ICMP only
  StateMask state = kStateAny;
  bool log = false;
  // Provenance, rendered as the remark that precedes the rule.
  std::string comment;

  static AclRule DenyAll();
  bool IsDenyAll() const;

  bool Matches(const HeaderPoint& x, ConnState state) const;
  // Header-space region; state is not part of it.
  Predicate ToPredicate() const;

  friend bool operator==(const AclRule&, const AclRule&) = default;
};

struct Acl {
  std::string name;
  std::vector<AclRule> rules;

  friend bool operator==(const Acl&, const Acl&) = default;
};

struct AclVerdict {
  AclAction action = AclAction::kDeny;
  std::optional<size_t> rule_index;  // absent when nothing matched
};

// First-match evaluation with an implicit deny when no rule matches.
AclVerdict EvalAcl(const Acl& acl, const HeaderPoint& x, ConnState state);

}  // namespace forestfw

#endif  // FORESTFW_ACL_H_
