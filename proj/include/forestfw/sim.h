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

// In-process packet-filter simulator over a compiled NetworkPolicy, with
// positive and negative vetting.

#ifndef FORESTFW_SIM_H_
#define FORESTFW_SIM_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "absl/status/statusor.h"
#include "forestfw/acl.h"
#include "forestfw/netgen.h"

namespace forestfw {

struct SimPacket {
  HeaderPoint header;
  std::string ingress_zone;
  ConnState state = ConnState::kNew;
};

// One ACL evaluation. `rule_index` is absent when the binding has no ACL or
// the ACL matched nothing.
struct TraceStep {
  std::string firewall;
  std::string interface;
  Direction direction = Direction::kInbound;
  std::string acl;
  std::optional<size_t> rule_index;
  AclAction action = AclAction::kDeny;

  // "R2/eth1/in/acl_2#17" with a 1-based rule number, "...#-" for no match.
  std::string ToString() const;
};

struct PathOutcome {
  std::string path;  // ZonePath::ToString()
  bool delivered = false;
  std::vector<TraceStep> trace;
};

struct InjectResult {
  std::string dst_zone;
  // One entry per candidate path.
  std::vector<PathOutcome> paths;
  // Source and destination share a zone; no firewall is involved.
  bool local = false;
  // Set when an ESTABLISHED packet had no connection entry.
  bool no_connection = false;

  bool delivered_any() const;
  bool delivered_all() const;
  std::string TraceString() const;
};

// Addresses and ports of a connection, normalized so both directions map to
// the same key.
using ConnKey = std::tuple<uint32_t, uint32_t, int, int, int>;
ConnKey ConnectionOf(const HeaderPoint& x);

struct SimEvent {
  ConnKey connection;
  ConnState state;
  bool delivered;
};

class SimNetwork {
 public:
  explicit SimNetwork(const NetworkPolicy& policy);

  // Zone whose address ranges contain `address`.
  std::optional<std::string> ZoneOf(uint32_t address) const;

  // Walks every candidate path from the ingress zone to the zone owning the
  // destination address. A delivered NEW packet opens a connection entry;
  // an ESTABLISHED packet without one is dropped before any firewall.
  absl::StatusOr<InjectResult> Inject(const SimPacket& packet);

  void ResetConnections() { connections_.clear(); }
  const std::set<ConnKey>& connections() const { return connections_; }
  const std::vector<SimEvent>& events() const { return events_; }

  const NetworkPolicy& policy() const { return policy_; }

 private:
  absl::StatusOr<const std::vector<ZonePath>*> PathsBetween(
      const std::string& src, const std::string& dst);
  TraceStep Evaluate(const std::string& firewall, const std::string& interface,
                     Direction direction, const HeaderPoint& x,
                     ConnState state) const;

  const NetworkPolicy& policy_;
  std::map<std::pair<std::string, std::string>, std::vector<ZonePath>> paths_;
  std::set<ConnKey> connections_;
  std::vector<SimEvent> events_;
};

struct VetResult {
  FlowRule flow;
  int outcome = 0;  // 1 when the representative packets got through
  InjectResult forward;
  std::optional<InjectResult> reverse;  // TCP only
  std::string detail;

  // "PASS <rule> <trace>" or "FAIL <rule> <trace>".
  std::string ToString() const;
};

// Lowest value of each dimension of the flow's service between the lowest
// addresses of its zones.
HeaderPoint RepresentativePacket(const FlowRule& flow, const ZoneModel& model);

std::vector<VetResult> VetPositive(const NetworkPolicy& policy);

struct ScanSpec {
  std::vector<int> protocols = {kProtoIcmp, kProtoTcp, kProtoUdp};
  IntervalSet ports;   // TCP/UDP destination ports; ICMP types use 0-255 of it
  int source_port = 49152;

  // Protocols {1, 6, 17}, ports 0-1023 plus every port the flows reference.
  static ScanSpec Default(const std::vector<FlowRule>& flows);
};

struct Leak {
  std::string src_zone;
  std::string dst_zone;
  HeaderPoint header;
  InjectResult result;

  std::string ToString() const;
};

std::vector<Leak> VetNegative(const NetworkPolicy& policy,
                              const ScanSpec& scan);

// Parses "0-1023,8080,24500-24600".
absl::StatusOr<IntervalSet> ParsePortSpec(std::string_view text);

}  // namespace forestfw

#endif  // FORESTFW_SIM_H_
