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

#include "forestfw/topo_model.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "boost/property_tree/ptree.hpp"
#include "boost/property_tree/xml_parser.hpp"

namespace forestfw {
namespace {

namespace pt = boost::property_tree;

struct GraphNode {
  std::string id;
  std::map<std::string, std::string> data;  // attr.name -> value
};

struct GraphEdge {
  std::string source;
  std::string target;
  std::map<std::string, std::string> data;
};

struct Graph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
};

std::string Attr(const pt::ptree& tree, const std::string& name) {
  return tree.get<std::string>("<xmlattr>." + name, "");
}

std::map<std::string, std::string> ReadData(
    const pt::ptree& element, const std::map<std::string, std::string>& keys) {
  std::map<std::string, std::string> out;
  for (const auto& [tag, child] : element) {
    if (tag != "data") continue;
    std::string key = Attr(child, "key");
    auto it = keys.find(key);
    out[it == keys.end() ? key : it->second] =
        std::string(absl::StripAsciiWhitespace(child.data()));
  }
  return out;
}

absl::StatusOr<Graph> ParseGraphMl(std::string_view text) {
  pt::ptree doc;
  try {
    std::istringstream in{std::string(text)};
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed GraphML: ", e.message(), " at line ",
                     e.line()));
  }
  auto root = doc.get_child_optional("graphml");
  if (!root) return absl::InvalidArgumentError("missing <graphml> element");

  std::map<std::string, std::string> keys;
  for (const auto& [tag, child] : *root) {
    if (tag != "key") continue;
    std::string name = Attr(child, "attr.name");
    keys[Attr(child, "id")] = name.empty() ? Attr(child, "id") : name;
  }
  auto graph = root->get_child_optional("graph");
  if (!graph) return absl::InvalidArgumentError("missing <graph> element");

  Graph out;
  std::set<std::string> ids;
  for (const auto& [tag, child] : *graph) {
    if (tag == "node") {
      GraphNode node{Attr(child, "id"), ReadData(child, keys)};
      if (node.id.empty()) {
        return absl::InvalidArgumentError("node without id");
      }
      if (!ids.insert(node.id).second) {
        return absl::InvalidArgumentError(
            absl::StrCat("duplicate node '", node.id, "'"));
      }
      out.nodes.push_back(std::move(node));
    } else if (tag == "edge") {
      out.edges.push_back(GraphEdge{Attr(child, "source"),
                                    Attr(child, "target"),
                                    ReadData(child, keys)});
    }
  }
  for (const GraphEdge& e : out.edges) {
    for (const std::string& end : {e.source, e.target}) {
      if (!ids.count(end)) {
        return absl::InvalidArgumentError(
            absl::StrCat("edge references unknown node '", end, "'"));
      }
    }
  }
  return out;
}

std::string Get(const std::map<std::string, std::string>& data,
                const std::string& key) {
  auto it = data.find(key);
  return it == data.end() ? "" : it->second;
}

std::string ConduitName(const Conduit& c) { return absl::StrCat(c.a, "--", c.b); }

// Union-find over device indices.
struct Segments {
  std::vector<size_t> parent;
  explicit Segments(size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  size_t Find(size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void Join(size_t a, size_t b) { parent[Find(a)] = Find(b); }
};

}  // namespace

const Device* Topology::Find(std::string_view name) const {
  for (const Device& d : devices) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::vector<const Device*> Topology::Firewalls() const {
  std::vector<const Device*> out;
  for (const Device& d : devices) {
    if (d.kind == DeviceKind::kFirewall) out.push_back(&d);
  }
  return out;
}

absl::StatusOr<Topology> LoadTopology(std::string_view graphml) {
  absl::StatusOr<Graph> graph = ParseGraphMl(graphml);
  if (!graph.ok()) return graph.status();

  Topology out;
  for (const GraphNode& node : graph->nodes) {
    Device d;
    d.name = node.id;
    std::string kind = Get(node.data, "kind");
    if (kind == "host") {
      d.kind = DeviceKind::kHost;
    } else if (kind == "subnet") {
      d.kind = DeviceKind::kSubnet;
    } else if (kind == "firewall") {
      d.kind = DeviceKind::kFirewall;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("device '", d.name, "' has unknown kind '", kind, "'"));
    }
    if (std::string zone = Get(node.data, "zone"); !zone.empty()) {
      if (d.kind == DeviceKind::kFirewall) {
        return absl::InvalidArgumentError(absl::StrCat(
            "firewall '", d.name, "' must not carry a zone label"));
      }
      d.zone_label = zone;
    }
    for (absl::string_view part :
         absl::StrSplit(Get(node.data, "cidr"), ',', absl::SkipWhitespace())) {
      absl::StatusOr<Cidr> cidr =
          Cidr::Parse(std::string(absl::StripAsciiWhitespace(part)));
      if (!cidr.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "device '", d.name, "': ", cidr.status().message()));
      }
      d.cidrs.push_back(*cidr);
    }
    if (d.kind != DeviceKind::kFirewall && d.cidrs.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("device '", d.name, "' has no cidr"));
    }
    d.vendor = Get(node.data, "vendor");
    d.carrier = Get(node.data, "carrier") == "true";
    out.devices.push_back(std::move(d));
  }

  std::map<std::string, std::set<std::string>> interfaces;
  for (const GraphEdge& e : graph->edges) {
    Link link{e.source, Get(e.data, "if_a"), e.target, Get(e.data, "if_b")};
    for (const auto& [device, iface] :
         {std::pair{link.device_a, link.interface_a},
          std::pair{link.device_b, link.interface_b}}) {
      bool firewall = out.Find(device)->kind == DeviceKind::kFirewall;
      if (iface.empty()) {
        if (firewall) {
          return absl::InvalidArgumentError(
              absl::StrCat("link ", link.device_a, "--", link.device_b,
                           " has no interface name on firewall '", device,
                           "'"));
        }
        continue;
      }
      if (!interfaces[device].insert(iface).second) {
        return absl::InvalidArgumentError(absl::StrCat(
            "duplicate interface '", iface, "' on device '", device, "'"));
      }
    }
    out.links.push_back(std::move(link));
  }
  return out;
}

std::string_view ZoneKindName(ZoneKind kind) {
  switch (kind) {
    case ZoneKind::kRegular:
      return "regular";
    case ZoneKind::kFirewall:
      return "firewall";
    case ZoneKind::kAbstract:
      return "abstract";
    case ZoneKind::kCarrier:
      return "carrier";
  }
  return "?";
}

Conduit Conduit::Between(std::string x, std::string y) {
  if (y < x) std::swap(x, y);
  return Conduit{std::move(x), std::move(y), {}};
}

bool Conduit::Joins(std::string_view x, std::string_view y) const {
  return (a == x && b == y) || (a == y && b == x);
}

const Zone* ZoneModel::FindZone(std::string_view name) const {
  for (const Zone& z : zones) {
    if (z.name == name) return &z;
  }
  return nullptr;
}

const Conduit* ZoneModel::FindConduit(std::string_view x,
                                      std::string_view y) const {
  for (const Conduit& c : conduits) {
    if (c.Joins(x, y)) return &c;
  }
  return nullptr;
}

std::vector<std::string> ZoneModel::Neighbors(std::string_view zone) const {
  std::vector<std::string> out;
  for (const Conduit& c : conduits) {
    if (c.a == zone) out.push_back(c.b);
    if (c.b == zone) out.push_back(c.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string> ZoneModel::InterfaceToward(
    std::string_view firewall, std::string_view zone) const {
  for (const Attachment& a : attachments) {
    if (a.firewall == firewall && a.zone == zone) return a.interface;
  }
  return std::nullopt;
}

absl::StatusOr<ZoneModel> BuildZoneFirewallModel(const Topology& topology) {
  const size_t n = topology.devices.size();
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < n; ++i) index[topology.devices[i].name] = i;
  auto is_firewall = [&](size_t i) {
    return topology.devices[i].kind == DeviceKind::kFirewall;
  };

  Segments segments(n);
  for (const Link& link : topology.links) {
    size_t a = index.at(link.device_a), b = index.at(link.device_b);
    if (is_firewall(a) && is_firewall(b)) {
      return absl::InvalidArgumentError(
          absl::StrCat("direct firewall link ", link.device_a, "--",
                       link.device_b, " has no transit segment"));
    }
    if (!is_firewall(a) && !is_firewall(b)) segments.Join(a, b);
  }

  // Firewalls touching each segment, via which interface.
  std::map<size_t, std::vector<std::pair<std::string, std::string>>> touching;
  for (const Link& link : topology.links) {
    size_t a = index.at(link.device_a), b = index.at(link.device_b);
    if (is_firewall(a) == is_firewall(b)) continue;
    if (is_firewall(b)) {
      touching[segments.Find(a)].push_back({link.device_b, link.interface_b});
    } else {
      touching[segments.Find(b)].push_back({link.device_a, link.interface_a});
    }
  }

  ZoneModel model;
  std::map<size_t, std::string> segment_zone;
  std::map<std::string, size_t> zone_index;
  int abstract_count = 0, carrier_count = 0, firewall_count = 0;

  for (size_t i = 0; i < n; ++i) {
    const Device& d = topology.devices[i];
    if (is_firewall(i)) {
      std::string name = absl::StrCat("fwz", ++firewall_count);
      model.firewall_zone[d.name] = name;
      zone_index[name] = model.zones.size();
      model.zones.push_back(Zone{name, ZoneKind::kFirewall, {d.name}, d.cidrs});
      continue;
    }
    size_t root = segments.Find(i);
    std::string zone_name;
    if (auto it = segment_zone.find(root); it != segment_zone.end()) {
      zone_name = it->second;
    } else {
      // Classify the segment when its first device appears.
      std::set<std::string> labels;
      bool carrier = false;
      for (size_t j = 0; j < n; ++j) {
        if (is_firewall(j) || segments.Find(j) != root) continue;
        if (topology.devices[j].zone_label) {
          labels.insert(*topology.devices[j].zone_label);
        }
        carrier = carrier || topology.devices[j].carrier;
      }
      if (labels.size() > 1) {
        return absl::InvalidArgumentError(
            absl::StrCat("segment of '", d.name,
                         "' carries conflicting zone labels: ",
                         absl::StrJoin(labels, ", ")));
      }
      std::set<std::string> firewalls;
      for (const auto& [fw, iface] : touching[root]) firewalls.insert(fw);
      ZoneKind kind;
      if (!labels.empty()) {
        zone_name = *labels.begin();
        kind = ZoneKind::kRegular;
      } else if (carrier) {
        zone_name = absl::StrCat("cz", ++carrier_count);
        kind = ZoneKind::kCarrier;
      } else if (firewalls.size() >= 2) {
        zone_name = absl::StrCat("az", ++abstract_count);
        kind = ZoneKind::kAbstract;
      } else {
        return absl::InvalidArgumentError(absl::StrCat(
            "cannot classify '", d.name,
            "': no zone label and not between two firewalls"));
      }
      segment_zone[root] = zone_name;
      if (!zone_index.count(zone_name)) {
        zone_index[zone_name] = model.zones.size();
        model.zones.push_back(Zone{zone_name, kind, {}, {}});
      }
      for (const auto& [fw, iface] : touching[root]) {
        model.attachments.push_back(Attachment{fw, iface, zone_name});
      }
    }
    Zone& zone = model.zones[zone_index.at(zone_name)];
    zone.members.push_back(d.name);
    zone.cidrs.insert(zone.cidrs.end(), d.cidrs.begin(), d.cidrs.end());
  }

  for (const auto& [fw, fwz] : model.firewall_zone) {
    model.attachments.push_back(
        Attachment{fw, std::string(kSelfInterface), fwz});
  }
  std::sort(model.attachments.begin(), model.attachments.end(),
            [](const Attachment& x, const Attachment& y) {
              return std::tie(x.firewall, x.interface, x.zone) <
                     std::tie(y.firewall, y.interface, y.zone);
            });

  // Address disjointness across zones.
  for (size_t i = 0; i < model.zones.size(); ++i) {
    for (size_t j = i + 1; j < model.zones.size(); ++j) {
      for (const Cidr& x : model.zones[i].cidrs) {
        for (const Cidr& y : model.zones[j].cidrs) {
          Interval rx = x.Range(), ry = y.Range();
          if (rx.lo <= ry.hi && ry.lo <= rx.hi) {
            return absl::InvalidArgumentError(absl::StrCat(
                "zones ", model.zones[i].name, " and ", model.zones[j].name,
                " overlap: ", x.ToString(), " and ", y.ToString()));
          }
        }
      }
    }
  }
  return model;
}

ZoneModel DeriveZoneConduit(ZoneModel model) {
  std::map<std::pair<std::string, std::string>, std::set<std::string>> found;
  for (const auto& [fw, fwz] : model.firewall_zone) {
    std::vector<std::string> attached;
    for (const Attachment& a : model.attachments) {
      if (a.firewall == fw && a.zone != fwz) attached.push_back(a.zone);
    }
    if (attached.empty()) {
      model.warnings.push_back(
          absl::StrCat("firewall '", fw, "' has no links; no conduits"));
      continue;
    }
    attached.push_back(fwz);
    for (size_t i = 0; i < attached.size(); ++i) {
      for (size_t j = i + 1; j < attached.size(); ++j) {
        if (attached[i] == attached[j]) continue;
        Conduit c = Conduit::Between(attached[i], attached[j]);
        found[{c.a, c.b}].insert(fw);
      }
    }
  }
  model.conduits.clear();
  for (const auto& [ends, firewalls] : found) {
    model.conduits.push_back(Conduit{ends.first, ends.second,
                                     {firewalls.begin(), firewalls.end()}});
  }
  return model;
}

absl::StatusOr<ZoneModel> LoadDeclaredModel(std::string_view graphml) {
  absl::StatusOr<Graph> graph = ParseGraphMl(graphml);
  if (!graph.ok()) return graph.status();
  ZoneModel model;
  for (const GraphNode& node : graph->nodes) {
    std::string kind = Get(node.data, "kind");
    Zone zone{node.id, ZoneKind::kRegular, {}, {}};
    if (kind == "firewall") {
      zone.kind = ZoneKind::kFirewall;
    } else if (kind == "abstract") {
      zone.kind = ZoneKind::kAbstract;
    } else if (kind == "carrier") {
      zone.kind = ZoneKind::kCarrier;
    } else if (kind != "regular" && !kind.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("zone '", node.id, "' has unknown kind '", kind, "'"));
    }
    model.zones.push_back(std::move(zone));
  }
  for (const GraphEdge& e : graph->edges) {
    if (e.source == e.target) {
      return absl::InvalidArgumentError(
          absl::StrCat("conduit joins zone '", e.source, "' to itself"));
    }
    if (!model.FindConduit(e.source, e.target)) {
      model.conduits.push_back(Conduit::Between(e.source, e.target));
    }
  }
  std::sort(model.conduits.begin(), model.conduits.end(),
            [](const Conduit& x, const Conduit& y) {
              return std::tie(x.a, x.b) < std::tie(y.a, y.b);
            });
  return model;
}

std::string CrosscheckResult::Report() const {
  if (ok()) return "zone-conduit model matches the declared model";
  std::vector<std::string> lines;
  auto add = [&](const char* what, const std::vector<std::string>& items) {
    if (!items.empty()) {
      lines.push_back(absl::StrCat(what, ": ", absl::StrJoin(items, ", ")));
    }
  };
  add("zones missing from declared model", missing_zones);
  add("zones not in topology", extra_zones);
  add("conduits missing from declared model", missing_conduits);
  add("conduits not realized by any firewall", extra_conduits);
  return absl::StrJoin(lines, "\n");
}

CrosscheckResult CrosscheckModel(const ZoneModel& derived,
                                 const ZoneModel& declared) {
  auto zone_names = [](const ZoneModel& m) {
    std::set<std::string> out;
    for (const Zone& z : m.zones) out.insert(z.name);
    return out;
  };
  auto conduit_names = [](const ZoneModel& m) {
    std::set<std::string> out;
    for (const Conduit& c : m.conduits) out.insert(ConduitName(c));
    return out;
  };
  auto minus = [](const std::set<std::string>& x,
                  const std::set<std::string>& y) {
    std::vector<std::string> out;
    std::set_difference(x.begin(), x.end(), y.begin(), y.end(),
                        std::back_inserter(out));
    return out;
  };
  CrosscheckResult r;
  std::set<std::string> dz = zone_names(derived), cz = zone_names(declared);
  std::set<std::string> dc = conduit_names(derived),
                        cc = conduit_names(declared);
  r.missing_zones = minus(dz, cz);
  r.extra_zones = minus(cz, dz);
  r.missing_conduits = minus(dc, cc);
  r.extra_conduits = minus(cc, dc);
  return r;
}

std::string ExportDot(const ZoneModel& model, GraphFlavor flavor) {
  auto shape = [](ZoneKind kind) {
    switch (kind) {
      case ZoneKind::kFirewall:
        return "box";
      case ZoneKind::kAbstract:
        return "diamond";
      case ZoneKind::kCarrier:
        return "hexagon";
      case ZoneKind::kRegular:
        break;
    }
    return "ellipse";
  };
  std::vector<const Zone*> zones;
  for (const Zone& z : model.zones) zones.push_back(&z);
  std::sort(zones.begin(), zones.end(),
            [](const Zone* x, const Zone* y) { return x->name < y->name; });

  std::string out = flavor == GraphFlavor::kZoneConduit
                        ? "graph zone_conduit {\n"
                        : "graph zone_firewall {\n";
  for (const Zone* z : zones) {
    if (flavor == GraphFlavor::kZoneFirewall && z->kind == ZoneKind::kFirewall) {
      continue;
    }
    absl::StrAppend(&out, "  \"", z->name, "\" [kind=\"",
                    std::string(ZoneKindName(z->kind)), "\", shape=",
                    shape(z->kind), "];\n");
  }
  if (flavor == GraphFlavor::kZoneConduit) {
    for (const Conduit& c : model.conduits) {
      absl::StrAppend(&out, "  \"", c.a, "\" -- \"", c.b, "\"");
      if (!c.firewalls.empty()) {
        absl::StrAppend(&out, " [label=\"", absl::StrJoin(c.firewalls, ","),
                        "\"]");
      }
      out += ";\n";
    }
  } else {
    for (const auto& [fw, fwz] : model.firewall_zone) {
      absl::StrAppend(&out, "  \"", fw, "\" [kind=\"firewall\", shape=box];\n");
    }
    for (const Attachment& a : model.attachments) {
      if (a.interface == kSelfInterface) continue;
      absl::StrAppend(&out, "  \"", a.firewall, "\" -- \"", a.zone,
                      "\" [label=\"", a.interface, "\"];\n");
    }
  }
  out += "}\n";
  return out;
}

}  // namespace forestfw
