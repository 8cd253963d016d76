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

// Topology ingestion and the zone models derived from it.

#ifndef FORESTFW_TOPO_MODEL_H_
#define FORESTFW_TOPO_MODEL_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "forestfw/header_space.h"

namespace forestfw {

enum class DeviceKind { kHost, kSubnet, kFirewall };

struct Device {
  std::string name;
  DeviceKind kind = DeviceKind::kSubnet;
  std::optional<std::string> zone_label;
  std::vector<Cidr> cidrs;
  std::string vendor;
  bool carrier = false;
};

// Interface names may be empty on non-firewall ends.
struct Link {
  std::string device_a;
  std::string interface_a;
  std::string device_b;
  std::string interface_b;
};

struct Topology {
  std::vector<Device> devices;  // document order
  std::vector<Link> links;

  const Device* Find(std::string_view name) const;
  std::vector<const Device*> Firewalls() const;
};

absl::StatusOr<Topology> LoadTopology(std::string_view graphml);

enum class ZoneKind { kRegular, kFirewall, kAbstract, kCarrier };

std::string_view ZoneKindName(ZoneKind kind);

struct Zone {
  std::string name;
  ZoneKind kind = ZoneKind::kRegular;
  std::vector<std::string> members;
  std::vector<Cidr> cidrs;
};

// An unordered zone pair, stored with a < b.
struct Conduit {
  std::string a;
  std::string b;
  std::vector<std::string> firewalls;

  static Conduit Between(std::string x, std::string y);
  bool Joins(std::string_view x, std::string_view y) const;
};

// A zone reachable from a firewall through one of its interfaces. Firewall
// zones attach through the pseudo-interface "self".
struct Attachment {
  std::string firewall;
  std::string interface;
  std::string zone;
};

inline constexpr std::string_view kSelfInterface = "self";

struct ZoneModel {
  std::vector<Zone> zones;
  std::vector<Conduit> conduits;  // empty until DeriveZoneConduit
  std::vector<Attachment> attachments;
  std::map<std::string, std::string> firewall_zone;  // firewall -> fwz<n>
  std::vector<std::string> warnings;

  const Zone* FindZone(std::string_view name) const;
  const Conduit* FindConduit(std::string_view x, std::string_view y) const;
  std::vector<std::string> Neighbors(std::string_view zone) const;
  // Interface of `firewall` facing `zone`, if attached.
  std::optional<std::string> InterfaceToward(std::string_view firewall,
                                             std::string_view zone) const;
};

// Groups non-firewall devices into zones: labelled segments become regular
// zones, unlabelled ones carrier zones (if marked) or abstract zones (if
// they sit between two or more firewalls). Each firewall gets fwz<n> in
// document order.
absl::StatusOr<ZoneModel> BuildZoneFirewallModel(const Topology& topology);

// Adds one conduit per pair of zones attached to a common firewall, and one
// from each firewall zone to every zone attached to its firewall.
ZoneModel DeriveZoneConduit(ZoneModel model);

absl::StatusOr<ZoneModel> LoadDeclaredModel(std::string_view graphml);

struct CrosscheckResult {
  std::vector<std::string> missing_zones;     // derived but not declared
  std::vector<std::string> extra_zones;       // declared but not derived
  std::vector<std::string> missing_conduits;  // as "a--b"
  std::vector<std::string> extra_conduits;

  bool ok() const {
    return missing_zones.empty() && extra_zones.empty() &&
           missing_conduits.empty() && extra_conduits.empty();
  }
  std::string Report() const;
};

CrosscheckResult CrosscheckModel(const ZoneModel& derived,
                                 const ZoneModel& declared);

enum class GraphFlavor { kZoneFirewall, kZoneConduit };

std::string ExportDot(const ZoneModel& model, GraphFlavor flavor);

}  // namespace forestfw

#endif  // FORESTFW_TOPO_MODEL_H_
