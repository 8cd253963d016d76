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

#include <cmath>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "forestfw/render.h"
#include "json.hpp"

namespace forestfw {
namespace {

using nlohmann::json;

json RangesJson(const IntervalSet& set) {
  json out = json::array();
  for (const Interval& i : set) out.push_back({i.lo, i.hi});
  return out;
}

IntervalSet RangesFromJson(const json& j) {
  IntervalSet out;
  for (const json& pair : j) out.Add({pair.at(0).get<int64_t>(), pair.at(1).get<int64_t>()});
  return out;
}

ZoneKind ZoneKindFrom(const std::string& name) {
  if (name == "firewall") return ZoneKind::kFirewall;
  if (name == "abstract") return ZoneKind::kAbstract;
  if (name == "carrier") return ZoneKind::kCarrier;
  return ZoneKind::kRegular;
}

int CountLoc(std::string_view text, std::initializer_list<std::string_view> prefixes) {
  int count = 0;
  for (absl::string_view raw : absl::StrSplit(std::string(text), '\n')) {
    std::string line(absl::StripAsciiWhitespace(raw));
    if (line.empty()) continue;
    bool comment = false;
    for (std::string_view p : prefixes) {
      comment = comment || line.rfind(std::string(p), 0) == 0;
    }
    if (!comment) ++count;
  }
  return count;
}

}  // namespace

int CountPolicyLoc(std::string_view policy_text) {
  return CountLoc(policy_text, {"//"});
}

int CountDeviceLoc(std::string_view device_text) {
  return CountLoc(device_text, {"#", "!"});
}

LocMetrics ComputeLocMetrics(std::string_view policy_text,
                             const std::vector<std::string>& device_texts) {
  LocMetrics m;
  m.high_level_loc = std::max(1, CountPolicyLoc(policy_text));
  for (const std::string& text : device_texts) m.device_loc += CountDeviceLoc(text);
  m.ratio = static_cast<double>(m.device_loc) / m.high_level_loc;
  return m;
}

std::string WriteManifest(const NetworkPolicy& policy,
                          const std::map<std::string, std::string>& inputs,
                          const LocMetrics& loc) {
  json j;
  j["generator"] = "forestfw";
  j["format"] = 1;
  j["inputs"] = inputs;
  json zones = json::array();
  for (const Zone& z : policy.model.zones) {
    json cidrs = json::array();
    for (const Cidr& c : z.cidrs) cidrs.push_back(c.ToString());
    zones.push_back({{"name", z.name},
                     {"kind", std::string(ZoneKindName(z.kind))},
                     {"members", z.members},
                     {"cidrs", cidrs}});
  }
  j["zones"] = zones;
  json conduits = json::array();
  for (const Conduit& c : policy.model.conduits) {
    conduits.push_back({{"a", c.a}, {"b", c.b}, {"firewalls", c.firewalls}});
  }
  j["conduits"] = conduits;
  json attachments = json::array();
  for (const Attachment& a : policy.model.attachments) {
    attachments.push_back(
        {{"firewall", a.firewall}, {"interface", a.interface}, {"zone", a.zone}});
  }
  j["attachments"] = attachments;
  j["firewall_zones"] = policy.model.firewall_zone;
  json flows = json::array();
  for (const FlowRule& f : policy.flows) {
    flows.push_back({{"rule", f.rule_name},
                     {"src", f.src_zone},
                     {"dst", f.dst_zone},
                     {"service",
                      {{"name", f.service.name},
                       {"protocol", f.service.protocol},
                       {"sport", RangesJson(f.service.source_ports)},
                       {"dport", RangesJson(f.service.dest_ports)},
                       {"icmp", RangesJson(f.service.icmp_types)},
                       {"comment", f.service.comment}}}});
  }
  j["flows"] = flows;
  json firewalls = json::array();
  for (const FirewallConfig& fw : policy.firewalls) {
    json assignments = json::array();
    for (const InterfaceAssignment& a : fw.assignments) {
      assignments.push_back({{"interface", a.interface},
                             {"direction", std::string(DirectionName(a.direction))},
                             {"acl", a.acl}});
    }
    firewalls.push_back(
        {{"name", fw.name},
         {"vendor", fw.vendor},
         {"neutral", absl::StrCat(fw.name, ".neutral.acl")},
         {"iptables_like", absl::StrCat(fw.name, ".iptables.txt")},
         {"asa_like", absl::StrCat(fw.name, ".asa.txt")},
         {"assignments", assignments}});
  }
  j["firewalls"] = firewalls;
  j["loc"] = {{"high_level", loc.high_level_loc},
              {"device", loc.device_loc},
              {"ratio", std::round(loc.ratio * 1000) / 1000}};
  return j.dump(2) + "\n";
}

absl::StatusOr<NetworkPolicy> ReadManifest(
    std::string_view manifest,
    const std::function<absl::StatusOr<std::string>(const std::string&)>&
        read_file) {
  json j = json::parse(manifest, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("manifest is not valid JSON");
  }
  NetworkPolicy out;
  try {
    for (const json& z : j.at("zones")) {
      Zone zone{z.at("name").get<std::string>(),
                ZoneKindFrom(z.at("kind").get<std::string>()),
                z.at("members").get<std::vector<std::string>>(),
                {}};
      for (const json& c : z.at("cidrs")) {
        absl::StatusOr<Cidr> cidr = Cidr::Parse(c.get<std::string>());
        if (!cidr.ok()) return cidr.status();
        zone.cidrs.push_back(*cidr);
      }
      out.model.zones.push_back(std::move(zone));
    }
    for (const json& c : j.at("conduits")) {
      out.model.conduits.push_back(
          Conduit{c.at("a").get<std::string>(), c.at("b").get<std::string>(),
                  c.at("firewalls").get<std::vector<std::string>>()});
    }
    for (const json& a : j.at("attachments")) {
      out.model.attachments.push_back(Attachment{
          a.at("firewall").get<std::string>(), a.at("interface").get<std::string>(),
          a.at("zone").get<std::string>()});
    }
    out.model.firewall_zone =
        j.at("firewall_zones").get<std::map<std::string, std::string>>();
    for (const json& f : j.at("flows")) {
      const json& s = f.at("service");
      Service service;
      service.name = s.at("name").get<std::string>();
      service.protocol = s.at("protocol").get<int>();
      service.source_ports = RangesFromJson(s.at("sport"));
      service.dest_ports = RangesFromJson(s.at("dport"));
      service.icmp_types = RangesFromJson(s.at("icmp"));
      service.comment = s.at("comment").get<std::string>();
      out.flows.push_back(FlowRule{f.at("rule").get<std::string>(),
                                   f.at("src").get<std::string>(),
                                   f.at("dst").get<std::string>(), service});
    }
    for (const json& f : j.at("firewalls")) {
      FirewallConfig fw;
      fw.name = f.at("name").get<std::string>();
      fw.vendor = f.at("vendor").get<std::string>();
      absl::StatusOr<std::string> text = read_file(f.at("neutral").get<std::string>());
      if (!text.ok()) return text.status();
      absl::StatusOr<std::vector<Acl>> acls = ParseNeutral(*text);
      if (!acls.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            f.at("neutral").get<std::string>(), ": ", acls.status().message()));
      }
      fw.acls = *std::move(acls);
      for (const json& a : f.at("assignments")) {
        fw.assignments.push_back(InterfaceAssignment{
            fw.name, a.at("interface").get<std::string>(),
            a.at("direction").get<std::string>() == "out" ? Direction::kOutbound
                                                          : Direction::kInbound,
            a.at("acl").get<std::string>()});
      }
      out.firewalls.push_back(std::move(fw));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad manifest: ", e.what()));
  }
  return out;
}

}  // namespace forestfw
