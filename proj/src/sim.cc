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

#include "forestfw/sim.h"

#include <algorithm>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace forestfw {
namespace {

std::optional<uint32_t> LowestAddress(const Zone& zone) {
  std::optional<uint32_t> out;
  for (const Cidr& c : zone.cidrs) {
    if (!out || c.network < *out) out = c.network;
  }
  return out;
}

std::string PacketString(const HeaderPoint& x) {
  std::string out = absl::StrCat(FormatAddress(x.src_addr), ">",
                                 FormatAddress(x.dst_addr), " ",
                                 ProtocolName(x.protocol));
  if (HasPorts(x.protocol)) {
    absl::StrAppend(&out, " ", x.sport, ">", x.dport);
  } else if (x.protocol == kProtoIcmp) {
    absl::StrAppend(&out, " type ", x.icmp_type);
  }
  return out;
}

HeaderPoint Reversed(const HeaderPoint& x) {
  HeaderPoint r = x;
  std::swap(r.src_addr, r.dst_addr);
  std::swap(r.sport, r.dport);
  return r;
}

}  // namespace

std::string TraceStep::ToString() const {
  return absl::StrCat(firewall, "/", interface, "/", std::string(DirectionName(direction)),
                      "/", acl.empty() ? "none" : acl, "#",
                      rule_index ? absl::StrCat(*rule_index + 1) : "-");
}

bool InjectResult::delivered_any() const {
  if (no_connection) return false;
  if (paths.empty()) return local;
  return std::any_of(paths.begin(), paths.end(),
                     [](const PathOutcome& p) { return p.delivered; });
}

bool InjectResult::delivered_all() const {
  if (no_connection) return false;
  if (paths.empty()) return local;
  return std::all_of(paths.begin(), paths.end(),
                     [](const PathOutcome& p) { return p.delivered; });
}

std::string InjectResult::TraceString() const {
  if (no_connection) return "[no-connection]";
  if (paths.empty()) return local ? "[local]" : "[no-path]";
  std::vector<std::string> parts;
  for (const PathOutcome& p : paths) {
    std::vector<std::string> steps;
    for (const TraceStep& s : p.trace) steps.push_back(s.ToString());
    parts.push_back(absl::StrCat("[", absl::StrJoin(steps, " "),
                                 p.delivered ? "" : " DROP", "]"));
  }
  return absl::StrJoin(parts, " ");
}

ConnKey ConnectionOf(const HeaderPoint& x) {
  ConnKey forward{x.src_addr, x.dst_addr, x.protocol, x.sport, x.dport};
  ConnKey backward{x.dst_addr, x.src_addr, x.protocol, x.dport, x.sport};
  return std::min(forward, backward);
}

SimNetwork::SimNetwork(const NetworkPolicy& policy) : policy_(policy) {}

std::optional<std::string> SimNetwork::ZoneOf(uint32_t address) const {
  for (const Zone& zone : policy_.model.zones) {
    for (const Cidr& c : zone.cidrs) {
      if (c.Contains(address)) return zone.name;
    }
  }
  return std::nullopt;
}

absl::StatusOr<const std::vector<ZonePath>*> SimNetwork::PathsBetween(
    const std::string& src, const std::string& dst) {
  auto key = std::make_pair(src, dst);
  auto it = paths_.find(key);
  if (it == paths_.end()) {
    absl::StatusOr<std::vector<ZonePath>> paths =
        EnumeratePaths(policy_.model, src, dst);
    if (!paths.ok()) return paths.status();
    it = paths_.emplace(key, *std::move(paths)).first;
  }
  return &it->second;
}

TraceStep SimNetwork::Evaluate(const std::string& firewall,
                               const std::string& interface,
                               Direction direction, const HeaderPoint& x,
                               ConnState state) const {
  TraceStep step{firewall, interface, direction, "", std::nullopt,
                 AclAction::kDeny};
  const FirewallConfig* fw = policy_.FindFirewall(firewall);
  const Acl* acl = fw ? fw->AclFor(interface, direction) : nullptr;
  if (acl == nullptr) return step;
  step.acl = acl->name;
  AclVerdict verdict = EvalAcl(*acl, x, state);
  step.rule_index = verdict.rule_index;
  step.action = verdict.action;
  return step;
}

absl::StatusOr<InjectResult> SimNetwork::Inject(const SimPacket& packet) {
  const HeaderPoint& x = packet.header;
  if (policy_.model.FindZone(packet.ingress_zone) == nullptr) {
    return absl::NotFoundError(
        absl::StrCat("unknown ingress zone '", packet.ingress_zone, "'"));
  }
  std::optional<std::string> dst_zone = ZoneOf(x.dst_addr);
  if (!dst_zone) {
    return absl::NotFoundError(absl::StrCat(
        "destination address ", FormatAddress(x.dst_addr), " is in no zone"));
  }
  InjectResult result;
  result.dst_zone = *dst_zone;
  const ConnKey conn = ConnectionOf(x);

  if (packet.state == ConnState::kEstablished && !connections_.count(conn)) {
    result.no_connection = true;
  } else if (*dst_zone == packet.ingress_zone) {
    result.local = true;
  } else {
    absl::StatusOr<const std::vector<ZonePath>*> paths =
        PathsBetween(packet.ingress_zone, *dst_zone);
    if (!paths.ok()) return paths.status();
    for (const ZonePath& path : **paths) {
      PathOutcome outcome{path.ToString(), true, {}};
      for (const Hop& hop : path.hops) {
        TraceStep step;
        if (hop.out_interface == kSelfInterface) {
          step = Evaluate(hop.firewall, std::string(kSelfInterface),
                          Direction::kInbound, x, packet.state);
        } else if (hop.in_interface == kSelfInterface) {
          step = Evaluate(hop.firewall, std::string(kSelfInterface),
                          Direction::kOutbound, x, packet.state);
        } else {
          step = Evaluate(hop.firewall, hop.in_interface, Direction::kInbound,
                          x, packet.state);
        }
        const bool pass = step.action == AclAction::kPermit;
        outcome.trace.push_back(std::move(step));
        if (!pass) {
          outcome.delivered = false;
          break;
        }
      }
      result.paths.push_back(std::move(outcome));
    }
  }

  const bool delivered = result.delivered_any();
  if (delivered && packet.state == ConnState::kNew) connections_.insert(conn);
  events_.push_back(SimEvent{conn, packet.state, delivered});
  return result;
}

std::string VetResult::ToString() const {
  std::string out = absl::StrCat(
      outcome == 1 ? "PASS " : "FAIL ", flow.rule_name, " ", flow.src_zone,
      "->", flow.dst_zone, ":", flow.service.name, " ", forward.TraceString());
  if (reverse) absl::StrAppend(&out, " return ", reverse->TraceString());
  if (!detail.empty()) absl::StrAppend(&out, " (", detail, ")");
  return out;
}

HeaderPoint RepresentativePacket(const FlowRule& flow, const ZoneModel& model) {
  HeaderPoint x;
  const Zone* src = model.FindZone(flow.src_zone);
  const Zone* dst = model.FindZone(flow.dst_zone);
  if (src) x.src_addr = LowestAddress(*src).value_or(0);
  if (dst) x.dst_addr = LowestAddress(*dst).value_or(0);
  const Service& s = flow.service;
  x.protocol = s.protocol == kAnyProtocol ? kProtoTcp : s.protocol;
  if (HasPorts(x.protocol)) {
    x.sport = s.source_ports.empty() ? 0 : static_cast<int>(s.source_ports.Min());
    x.dport = s.dest_ports.empty() ? 0 : static_cast<int>(s.dest_ports.Min());
  }
  if (x.protocol == kProtoIcmp && !s.icmp_types.empty()) {
    x.icmp_type = static_cast<int>(s.icmp_types.Min());
  }
  return x;
}

std::vector<VetResult> VetPositive(const NetworkPolicy& policy) {
  std::vector<VetResult> out;
  SimNetwork net(policy);
  for (const FlowRule& flow : policy.flows) {
    net.ResetConnections();
    VetResult result;
    result.flow = flow;
    HeaderPoint x = RepresentativePacket(flow, policy.model);
    absl::StatusOr<InjectResult> forward =
        net.Inject({x, flow.src_zone, ConnState::kNew});
    if (!forward.ok()) {
      result.detail = std::string(forward.status().message());
      out.push_back(std::move(result));
      continue;
    }
    result.forward = *forward;
    bool ok = forward->delivered_all();
    if (ok && x.protocol == kProtoTcp) {
      absl::StatusOr<InjectResult> reverse =
          net.Inject({Reversed(x), flow.dst_zone, ConnState::kEstablished});
      if (reverse.ok()) {
        result.reverse = *reverse;
        ok = reverse->delivered_all();
      } else {
        result.detail = std::string(reverse.status().message());
        ok = false;
      }
    }
    if (!ok && result.detail.empty()) result.detail = PacketString(x);
    result.outcome = ok ? 1 : 0;
    out.push_back(std::move(result));
  }
  return out;
}

ScanSpec ScanSpec::Default(const std::vector<FlowRule>& flows) {
  ScanSpec spec;
  spec.ports = IntervalSet::Of(0, 1023);
  const IntervalSet full = IntervalSet::Of(0, kMaxPort);
  for (const FlowRule& flow : flows) {
    if (!HasPorts(flow.service.protocol)) continue;
    for (const IntervalSet* set :
         {&flow.service.dest_ports, &flow.service.source_ports}) {
      if (*set != full) spec.ports = spec.ports.Union(*set);
    }
  }
  return spec;
}

std::string Leak::ToString() const {
  return absl::StrCat("FAIL leak ", src_zone, "->", dst_zone, " ",
                      PacketString(header), " ", result.TraceString());
}

std::vector<Leak> VetNegative(const NetworkPolicy& policy,
                              const ScanSpec& scan) {
  std::vector<std::pair<const FlowRule*, Predicate>> allowed;
  for (const FlowRule& flow : policy.flows) {
    allowed.emplace_back(&flow, flow.service.ToPredicate());
  }
  auto implied = [&](const std::string& a, const std::string& b,
                     const HeaderPoint& x) {
    return std::any_of(allowed.begin(), allowed.end(), [&](const auto& entry) {
      return entry.first->src_zone == a && entry.first->dst_zone == b &&
             Matches(entry.second, x);
    });
  };

  const IntervalSet icmp_types =
      scan.ports.Intersect(IntervalSet::Of(0, kMaxIcmpType));
  std::vector<Leak> leaks;
  SimNetwork net(policy);
  for (const Zone& a : policy.model.zones) {
    std::optional<uint32_t> src = LowestAddress(a);
    if (!src) continue;
    for (const Zone& b : policy.model.zones) {
      std::optional<uint32_t> dst = LowestAddress(b);
      if (!dst || a.name == b.name) continue;
      for (int protocol : scan.protocols) {
        std::vector<HeaderPoint> packets;
        if (HasPorts(protocol)) {
          for (const Interval& i : scan.ports) {
            for (int64_t port = i.lo; port <= i.hi; ++port) {
              packets.push_back({*src, *dst, protocol, scan.source_port,
                                 static_cast<int>(port), 0});
            }
          }
        } else if (protocol == kProtoIcmp) {
          for (const Interval& i : icmp_types) {
            for (int64_t type = i.lo; type <= i.hi; ++type) {
              packets.push_back(
                  {*src, *dst, protocol, 0, 0, static_cast<int>(type)});
            }
          }
        } else {
          packets.push_back({*src, *dst, protocol, 0, 0, 0});
        }
        for (const HeaderPoint& x : packets) {
          net.ResetConnections();
          absl::StatusOr<InjectResult> result =
              net.Inject({x, a.name, ConnState::kNew});
          if (!result.ok() || !result->delivered_any()) continue;
          if (implied(a.name, b.name, x)) continue;
          leaks.push_back(Leak{a.name, b.name, x, *std::move(result)});
        }
      }
    }
  }
  return leaks;
}

absl::StatusOr<IntervalSet> ParsePortSpec(std::string_view text) {
  IntervalSet out;
  for (absl::string_view item :
       absl::StrSplit(std::string(text), ',', absl::SkipWhitespace())) {
    std::vector<std::string> bounds =
        absl::StrSplit(absl::StripAsciiWhitespace(item), '-');
    int64_t lo = 0, hi = 0;
    if (bounds.size() > 2 || !absl::SimpleAtoi(bounds.front(), &lo) ||
        !absl::SimpleAtoi(bounds.back(), &hi) || lo < 0 || hi > kMaxPort ||
        lo > hi) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad port range '", std::string(item), "'"));
    }
    out.Add({lo, hi});
  }
  return out;
}

}  // namespace forestfw
