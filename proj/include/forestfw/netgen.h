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

// Compilation of a high-level policy onto a topology: path selection, rule
// translation, supplementary rules and ACL placement.

#ifndef FORESTFW_NETGEN_H_
#define FORESTFW_NETGEN_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "forestfw/acl.h"
#include "forestfw/canonical.h"
#include "forestfw/diagnostics.h"
#include "forestfw/policy_lang.h"
#include "forestfw/topo_model.h"

namespace forestfw {

// One firewall traversal: traffic enters `firewall` from `from_zone` on
// `in_interface` and leaves toward `to_zone` on `out_interface`. Either
// interface is "self" when the firewall itself is the endpoint.
struct Hop {
  std::string firewall;
  std::string from_zone;
  std::string to_zone;
  std::string in_interface;
  std::string out_interface;

  friend bool operator==(const Hop&, const Hop&) = default;
};

struct ZonePath {
  std::vector<std::string> zones;
  std::vector<Hop> hops;

  std::string ToString() const;
};

// All simple conduit paths from `src` to `dst` that do not pass through a
// firewall zone, do not use any firewall interface twice, and, when an
// endpoint is a firewall zone, traverse that firewall only once. One entry
// per firewall realization, ordered by zone names then firewall names.
absl::StatusOr<std::vector<ZonePath>> EnumeratePaths(const ZoneModel& model,
                                                     std::string_view src,
                                                     std::string_view dst);

// Forward rules over the cross product of the two zones' addresses.
absl::StatusOr<std::vector<AclRule>> TranslateRule(const FlowRule& flow,
                                                   const ZoneModel& model,
                                                   bool log);

struct SupplementedRules {
  std::vector<AclRule> forward;
  std::vector<AclRule> reverse;  // return path, mirrored
};

// TCP gets NEW,ESTABLISHED forward and an ESTABLISHED return; UDP gets a
// stateless return; everything else is forward-only.
SupplementedRules AddSupplementaryRules(std::vector<AclRule> forward,
                                        const FlowRule& flow);

// Multicast permits for OSPF neighbour discovery.
std::vector<AclRule> OspfRules();

enum class Direction { kInbound, kOutbound };

std::string_view DirectionName(Direction direction);

struct InterfaceAssignment {
  std::string firewall;
  std::string interface;
  Direction direction = Direction::kInbound;
  std::string acl;

  friend bool operator==(const InterfaceAssignment&,
                         const InterfaceAssignment&) = default;
};

struct FirewallConfig {
  std::string name;
  std::string vendor;
  std::vector<Acl> acls;  // acl_1, acl_2, ...
  std::vector<InterfaceAssignment> assignments;

  const Acl* FindAcl(std::string_view name) const;
  const Acl* AclFor(std::string_view interface, Direction direction) const;
};

struct NetworkPolicy {
  ZoneModel model;
  std::vector<FlowRule> flows;
  std::vector<FirewallConfig> firewalls;  // sorted by name

  const FirewallConfig* FindFirewall(std::string_view name) const;
};

struct CompileOptions {
  bool ospf = false;
  std::optional<BestPractice> best_practice;
  // The model named by `load_zone_conduit_model`; crosscheck is skipped
  // when absent.
  std::optional<ZoneModel> declared_model;
};

// Every verification gate that must pass before compilation: validation,
// model crosscheck, zone existence, rule overlaps and best practice.
std::vector<Diagnostic> Preflight(const PolicySpec& spec,
                                  const ZoneModel& derived,
                                  const CompileOptions& options);

// Fails with the preflight diagnostics if any of them is an error.
absl::StatusOr<NetworkPolicy> Compile(const PolicySpec& spec,
                                      const Topology& topology,
                                      const CompileOptions& options);

// Lower-level entry that skips preflight.
absl::StatusOr<NetworkPolicy> CompileFlows(std::vector<FlowRule> flows,
                                           const PolicySpec& spec,
                                           const Topology& topology,
                                           ZoneModel model,
                                           const CompileOptions& options);

// Permits with the ip wildcard, or TCP/UDP permits open on both ports.
int CountGenericPermits(const NetworkPolicy& policy);
int CountUnassignedAcls(const NetworkPolicy& policy);

}  // namespace forestfw

#endif  // FORESTFW_NETGEN_H_
