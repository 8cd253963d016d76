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

#include "forestfw/acl.h"

namespace forestfw {

AclRule AclRule::DenyAll() {
  AclRule rule;
  rule.action = AclAction::kDeny;
  rule.protocol = kIpWildcard;
  return rule;
}

bool AclRule::IsDenyAll() const {
  return action == AclAction::kDeny && protocol == kIpWildcard &&
         src.prefix_len == 0 && dst.prefix_len == 0 && state == kStateAny;
}

Predicate AclRule::ToPredicate() const {
  Predicate p = protocol == kIpWildcard
                    ? Predicate::Full()
                    : Predicate::ForProtocol(protocol, sport, dport,
                                             icmp_types);
  p.src = IntervalSet({src.Range()});
  p.dst = IntervalSet({dst.Range()});
  return p;
}

bool AclRule::Matches(const HeaderPoint& x, ConnState conn) const {
  if (!StateMatches(state, conn)) return false;
  if (!src.Contains(x.src_addr) || !dst.Contains(x.dst_addr)) return false;
  if (protocol == kIpWildcard) return true;
  if (x.protocol != protocol) return false;
  if (HasPorts(protocol)) {
    return sport.Contains(x.sport) && dport.Contains(x.dport);
  }
  if (protocol == kProtoIcmp) return icmp_types.Contains(x.icmp_type);
  return true;
}

AclVerdict EvalAcl(const Acl& acl, const HeaderPoint& x, ConnState state) {
  for (size_t i = 0; i < acl.rules.size(); ++i) {
    if (acl.rules[i].Matches(x, state)) return {acl.rules[i].action, i};
  }
  return {AclAction::kDeny, std::nullopt};
}

}  // namespace forestfw
