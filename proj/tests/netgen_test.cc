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

#include "forestfw/netgen.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "forestfw/checker.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace forestfw {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using ::testing::IsEmpty;
using ::testing::SizeIs;

std::string ReadFixture(const std::string& rel) {
  std::ifstream in(std::string(FORESTFW_FIXTURE_DIR) + "/" + rel);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct CaseStudy {
  PolicySpec spec;
  Topology topology;
  ZoneModel model;
  CompileOptions options;
};

CaseStudy LoadCaseStudy(const std::string& policy_file) {
  CaseStudy cs;
  absl::StatusOr<PolicySpec> spec = ParsePolicy(
      ReadFixture("case_study/" + policy_file), BuiltinImporter(), policy_file);
  EXPECT_TRUE(spec.ok()) << spec.status();
  cs.spec = *spec;
  absl::StatusOr<Topology> topology =
      LoadTopology(ReadFixture("case_study/topology.graphml"));
  EXPECT_TRUE(topology.ok()) << topology.status();
  cs.topology = *topology;
  cs.model = DeriveZoneConduit(*BuildZoneFirewallModel(cs.topology));
  cs.options.declared_model =
      *LoadDeclaredModel(ReadFixture("case_study/zone_conduit.graphml"));
  return cs;
}

NetworkPolicy CompileFixed() {
  CaseStudy cs = LoadCaseStudy("policy_fixed.policyml");
  absl::StatusOr<NetworkPolicy> policy =
      Compile(cs.spec, cs.topology, cs.options);
  EXPECT_TRUE(policy.ok()) << policy.status();
  return *policy;
}

std::vector<std::string> PathStrings(const std::vector<ZonePath>& paths) {
  std::vector<std::string> out;
  for (const ZonePath& p : paths) out.push_back(p.ToString());
  return out;
}

TEST(EnumeratePathsTest, ScadaToCorpGoesThroughDmz) {
  CaseStudy cs = LoadCaseStudy("policy_fixed.policyml");
  absl::StatusOr<std::vector<ZonePath>> paths =
      EnumeratePaths(cs.model, "z3", "z1");
  ASSERT_TRUE(paths.ok()) << paths.status();
  EXPECT_THAT(PathStrings(*paths),
              ElementsAre("z3 -[R2 eth1>eth0]- az1 -[R1 eth1>eth0]- z1"));
}

TEST(EnumeratePathsTest, ManagementIsDirect) {
  CaseStudy cs = LoadCaseStudy("policy_fixed.policyml");
  EXPECT_THAT(PathStrings(*EnumeratePaths(cs.model, "z1", "fwz1")),
              ElementsAre("z1 -[R1 eth0>self]- fwz1"));
  EXPECT_THAT(PathStrings(*EnumeratePaths(cs.model, "z1", "fwz2")),
              ElementsAre("z1 -[R1 eth0>eth1]- az1 -[R2 eth0>self]- fwz2"));
}

TEST(EnumeratePathsTest, NoFirewallZoneInTheMiddle) {
  CaseStudy cs = LoadCaseStudy("policy_fixed.policyml");
  for (const Zone& a : cs.model.zones) {
    for (const Zone& b : cs.model.zones) {
      if (a.name == b.name) continue;
      absl::StatusOr<std::vector<ZonePath>> paths =
          EnumeratePaths(cs.model, a.name, b.name);
      if (!paths.ok()) continue;
      for (const ZonePath& p : *paths) {
        for (size_t i = 1; i + 1 < p.zones.size(); ++i) {
          EXPECT_NE(cs.model.FindZone(p.zones[i])->kind, ZoneKind::kFirewall)
              << p.ToString();
        }
      }
    }
  }
}

TEST(EnumeratePathsTest, TransitOnlyThroughFirewallZoneFails) {
  ZoneModel m;
  m.zones = {{"a", ZoneKind::kRegular, {}, {}},
             {"b", ZoneKind::kRegular, {}, {}},
             {"fwz1", ZoneKind::kFirewall, {}, {}}};
  m.firewall_zone["F"] = "fwz1";
  m.conduits = {Conduit{"a", "fwz1", {"F"}}, Conduit{"b", "fwz1", {"F"}}};
  absl::StatusOr<std::vector<ZonePath>> paths = EnumeratePaths(m, "a", "b");
  EXPECT_FALSE(paths.ok());
  EXPECT_THAT(std::string(paths.status().message()), HasSubstr("no valid path"));
}

// Independent enumeration: every ordering of every subset of the interior
// zones, filtered by adjacency and the three path rules.
std::set<std::string> BruteForcePaths(const ZoneModel& m, const std::string& src,
                                      const std::string& dst) {
  std::vector<std::string> others;
  for (const Zone& z : m.zones) {
    if (z.name != src && z.name != dst) others.push_back(z.name);
  }
  std::set<std::string> out;
  for (unsigned mask = 0; mask < (1u << others.size()); ++mask) {
    std::vector<std::string> interior;
    for (size_t i = 0; i < others.size(); ++i) {
      if (mask & (1u << i)) interior.push_back(others[i]);
    }
    std::sort(interior.begin(), interior.end());
    do {
      std::vector<std::string> zones = {src};
      zones.insert(zones.end(), interior.begin(), interior.end());
      zones.push_back(dst);
      bool ok = true;
      for (size_t i = 1; i + 1 < zones.size(); ++i) {
        ok = ok && m.FindZone(zones[i])->kind != ZoneKind::kFirewall;
      }
      for (size_t i = 0; ok && i + 1 < zones.size(); ++i) {
        const Conduit* c = m.FindConduit(zones[i], zones[i + 1]);
        ok = c != nullptr && c->firewalls.size() == 1;
      }
      if (!ok) continue;
      std::multiset<std::string> interfaces;
      std::map<std::string, int> visits;
      for (size_t i = 0; i + 1 < zones.size(); ++i) {
        std::string fw = m.FindConduit(zones[i], zones[i + 1])->firewalls[0];
        ++visits[fw];
        for (const std::string& z : {zones[i], zones[i + 1]}) {
          std::string iface = m.firewall_zone.at(fw) == z
                                  ? "self"
                                  : *m.InterfaceToward(fw, z);
          interfaces.insert(fw + "/" + iface);
        }
      }
      for (const std::string& i : interfaces) {
        ok = ok && interfaces.count(i) == 1;
      }
      for (const auto& [fw, fwz] : m.firewall_zone) {
        if ((fwz == src || fwz == dst) && visits[fw] != 1) ok = false;
      }
      if (ok) out.insert(absl::StrJoin(zones, ","));
    } while (std::next_permutation(interior.begin(), interior.end()));
  }
  return out;
}

TEST(EnumeratePathsTest, AgreesWithBruteForce) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    // Random firewalls over up to four labelled subnets.
    Topology t;
    int subnets = 2 + static_cast<int>(rng() % 3);
    for (int s = 0; s < subnets; ++s) {
      t.devices.push_back(Device{absl::StrCat("s", s), DeviceKind::kSubnet,
                                 absl::StrCat("z", s),
                                 {*Cidr::Parse(absl::StrCat("10.", s, ".0.0/16"))},
                                 "",
                                 false});
    }
    int firewalls = 1 + static_cast<int>(rng() % 3);
    for (int f = 0; f < firewalls; ++f) {
      std::string fw = absl::StrCat("F", f);
      t.devices.push_back(Device{fw, DeviceKind::kFirewall, std::nullopt, {}, "", false});
      int port = 0;
      for (int s = 0; s < subnets; ++s) {
        if (rng() % 2) continue;
        t.links.push_back(Link{fw, absl::StrCat("eth", port++), absl::StrCat("s", s), ""});
      }
    }
    absl::StatusOr<ZoneModel> built = BuildZoneFirewallModel(t);
    ASSERT_TRUE(built.ok()) << built.status();
    ZoneModel m = DeriveZoneConduit(*built);
    for (const Zone& a : m.zones) {
      for (const Zone& b : m.zones) {
        if (a.name == b.name) continue;
        std::set<std::string> expected = BruteForcePaths(m, a.name, b.name);
        std::set<std::string> got;
        absl::StatusOr<std::vector<ZonePath>> paths =
            EnumeratePaths(m, a.name, b.name);
        bool multi_firewall = false;
        for (const Conduit& c : m.conduits) multi_firewall |= c.firewalls.size() > 1;
        if (multi_firewall) continue;
        if (paths.ok()) {
          for (const ZonePath& p : *paths) got.insert(absl::StrJoin(p.zones, ","));
        }
        EXPECT_EQ(got, expected) << a.name << " -> " << b.name;
      }
    }
  }
}

FlowRule Flow(const PolicySpec& spec, const std::string& rule,
              const std::string& service, std::string src, std::string dst) {
  absl::StatusOr<ServiceSet> s = ResolveServiceExpr(service, spec);
  EXPECT_TRUE(s.ok()) << s.status();
  return FlowRule{rule, std::move(src), std::move(dst), s->members().at(0)};
}

TEST(TranslateRuleTest, CrossProductOfZoneAddresses) {
  CaseStudy cs = LoadCaseStudy("policy_fixed.policyml");
  FlowRule f = Flow(cs.spec, "web_rule", "iana_services.https", "z3", "z1");
  absl::StatusOr<std::vector<AclRule>> rules = TranslateRule(f, cs.model, true);
  ASSERT_TRUE(rules.ok());
  ASSERT_THAT(*rules, SizeIs(2));
  EXPECT_EQ((*rules)[0].src.ToString(), "10.0.0.16/29");
  EXPECT_EQ((*rules)[0].dst.ToString(), "10.0.0.0/29");
  EXPECT_EQ((*rules)[1].dst.ToString(), "10.0.128.4/30");
  EXPECT_EQ((*rules)[0].dport, IntervalSet::Point(443));
  EXPECT_TRUE((*rules)[0].log);
  EXPECT_EQ((*rules)[0].comment, "web_rule: HTTPS (z3 to z1, forward path)");

  FlowRule single = Flow(cs.spec, "r", "iana_services.https", "z3", "z2");
  EXPECT_THAT(*TranslateRule(single, cs.model, false), SizeIs(1));
}

TEST(TranslateRuleTest, ThreeByTwo) {
  ZoneModel m;
  m.zones = {{"a", ZoneKind::kRegular, {},
              {*Cidr::Parse("10.0.0.0/24"), *Cidr::Parse("10.0.1.0/24"),
               *Cidr::Parse("10.0.2.0/24")}},
             {"b", ZoneKind::kRegular, {},
              {*Cidr::Parse("10.1.0.0/24"), *Cidr::Parse("10.1.1.0/24")}},
             {"c", ZoneKind::kAbstract, {}, {}}};
  Service s;
  s.name = "x";
  s.protocol = kProtoUdp;
  s.source_ports = IntervalSet::Of(0, kMaxPort);
  s.dest_ports = IntervalSet::Point(53);
  EXPECT_THAT(*TranslateRule(FlowRule{"r", "a", "b", s}, m, false), SizeIs(6));
  EXPECT_FALSE(TranslateRule(FlowRule{"r", "a", "c", s}, m, false).ok());
}

TEST(SupplementaryRulesTest, TcpGetsStatefulReturn) {
  CaseStudy cs = LoadCaseStudy("policy_fixed.policyml");
  FlowRule f = Flow(cs.spec, "web_rule", "iana_services.https", "z3", "z1");
  SupplementedRules r =
      AddSupplementaryRules(*TranslateRule(f, cs.model, true), f);
  ASSERT_THAT(r.forward, SizeIs(2));
  ASSERT_THAT(r.reverse, SizeIs(2));
  EXPECT_EQ(r.forward[0].state, kStateNew | kStateEstablished);
  EXPECT_EQ(r.reverse[0].state, kStateEstablished);
  EXPECT_EQ(r.reverse[0].sport, IntervalSet::Point(443));
  EXPECT_EQ(r.reverse[0].dport, IntervalSet::Of(0, kMaxPort));
  EXPECT_EQ(r.reverse[0].src.ToString(), "10.0.0.0/29");
  EXPECT_THAT(r.reverse[0].comment, HasSubstr("return path"));
}

TEST(SupplementaryRulesTest, UdpStatelessIcmpNone) {
  CaseStudy cs = LoadCaseStudy("policy_fixed.policyml");
  FlowRule udp = Flow(cs.spec, "dns_rule", "iana_services.dns_udp", "z3", "z1");
  SupplementedRules r =
      AddSupplementaryRules(*TranslateRule(udp, cs.model, false), udp);
  EXPECT_EQ(r.forward[0].state, kStateAny);
  ASSERT_THAT(r.reverse, SizeIs(2));
  EXPECT_EQ(r.reverse[0].state, kStateAny);
  EXPECT_EQ(r.reverse[0].sport, IntervalSet::Point(53));

  FlowRule icmp = Flow(cs.spec, "ping_rule", "iana_icmp.icmp_echo", "z3", "z1");
  EXPECT_THAT(
      AddSupplementaryRules(*TranslateRule(icmp, cs.model, false), icmp).reverse,
      IsEmpty());
}

TEST(CompileTest, CaseStudyLayout) {
  NetworkPolicy p = CompileFixed();
  ASSERT_THAT(p.firewalls, SizeIs(3));
  EXPECT_EQ(p.firewalls[0].name, "GW");
  const FirewallConfig* r2 = p.FindFirewall("R2");
  ASSERT_NE(r2, nullptr);
  EXPECT_EQ(r2->vendor, "iptables_like");
  EXPECT_THAT(r2->assignments,
              ElementsAre(
                  InterfaceAssignment{"R2", "eth0", Direction::kInbound, "acl_1"},
                  InterfaceAssignment{"R2", "eth1", Direction::kInbound, "acl_2"},
                  InterfaceAssignment{"R2", "self", Direction::kInbound, "acl_3"},
                  InterfaceAssignment{"R2", "self", Direction::kOutbound, "acl_4"}));
  // The SCADA-facing ACL holds scada->corp HTTPS forward and the HMI return.
  const Acl* acl2 = r2->FindAcl("acl_2");
  bool forward = false, hmi_return = false;
  for (const AclRule& r : acl2->rules) {
    if (r.protocol != kProtoTcp) continue;
    if (r.dport == IntervalSet::Point(443) &&
        r.state == (kStateNew | kStateEstablished)) {
      forward = true;
    }
    if (r.sport == IntervalSet::Point(443) && r.state == kStateEstablished &&
        r.comment.rfind("hmi_rule", 0) == 0) {
      hmi_return = true;
    }
  }
  EXPECT_TRUE(forward);
  EXPECT_TRUE(hmi_return);
  EXPECT_TRUE(acl2->rules.back().IsDenyAll());
}

TEST(CompileTest, ZeroDefectCounts) {
  NetworkPolicy p = CompileFixed();
  EXPECT_EQ(CountGenericPermits(p), 0);
  EXPECT_EQ(CountUnassignedAcls(p), 0);
  for (const FirewallConfig& fw : p.firewalls) {
    for (const Acl& acl : fw.acls) {
      EXPECT_THAT(FindAclAnomalies(acl), IsEmpty()) << fw.name << " " << acl.name;
      int denies = 0;
      for (const AclRule& r : acl.rules) denies += r.action == AclAction::kDeny;
      EXPECT_EQ(denies, 1);
      EXPECT_TRUE(acl.rules.back().IsDenyAll());
    }
  }
}

TEST(CompileTest, OverlapStopsCompilation) {
  CaseStudy cs = LoadCaseStudy("policy.policyml");
  absl::StatusOr<NetworkPolicy> p = Compile(cs.spec, cs.topology, cs.options);
  ASSERT_FALSE(p.ok());
  EXPECT_THAT(std::string(p.status().message()),
              HasSubstr("file_transfer_rule and web_rule"));
}

TEST(CompileTest, ModelMismatchStopsCompilation) {
  CaseStudy cs = LoadCaseStudy("policy_fixed.policyml");
  cs.options.declared_model = *LoadDeclaredModel(
      ReadFixture("case_study/zone_conduit_missing_fwz3.graphml"));
  absl::StatusOr<NetworkPolicy> p = Compile(cs.spec, cs.topology, cs.options);
  ASSERT_FALSE(p.ok());
  EXPECT_THAT(std::string(p.status().message()), HasSubstr("fwz3"));
}

TEST(CompileTest, BestPracticeViolationStopsCompilation) {
  CaseStudy cs = LoadCaseStudy("policy_fixed.policyml");
  absl::StatusOr<PolicySpec> bp_spec =
      ParsePolicy(ReadFixture("case_study/bestpractice/scada_strict.policyml"),
                  BuiltinImporter(), "scada_strict.policyml");
  ASSERT_TRUE(bp_spec.ok()) << bp_spec.status();
  cs.options.best_practice = *LoadBestPractice(*bp_spec);
  absl::StatusOr<NetworkPolicy> p = Compile(cs.spec, cs.topology, cs.options);
  ASSERT_FALSE(p.ok());
  EXPECT_THAT(std::string(p.status().message()), HasSubstr("best practice"));

  bp_spec =
      ParsePolicy(ReadFixture("case_study/bestpractice/scada_baseline.policyml"),
                  BuiltinImporter(), "scada_baseline.policyml");
  cs.options.best_practice = *LoadBestPractice(*bp_spec);
  EXPECT_TRUE(Compile(cs.spec, cs.topology, cs.options).ok());
}

TEST(CompileTest, EmptyPolicyIsDenyOnly) {
  CaseStudy cs = LoadCaseStudy("policy_fixed.policyml");
  absl::StatusOr<NetworkPolicy> p =
      CompileFlows({}, cs.spec, cs.topology, cs.model, {});
  ASSERT_TRUE(p.ok());
  int acls = 0;
  for (const FirewallConfig& fw : p->firewalls) {
    for (const Acl& acl : fw.acls) {
      ++acls;
      ASSERT_THAT(acl.rules, SizeIs(1));
      EXPECT_TRUE(acl.rules[0].IsDenyAll());
    }
  }
  // Two linked interfaces plus two self stages per firewall.
  EXPECT_EQ(acls, 12);
}

TEST(CompileTest, OspfPermitsOnEveryFirewall) {
  CaseStudy cs = LoadCaseStudy("policy_fixed.policyml");
  cs.options.ospf = true;
  NetworkPolicy p = *Compile(cs.spec, cs.topology, cs.options);
  for (const FirewallConfig& fw : p.firewalls) {
    for (Direction d : {Direction::kInbound, Direction::kOutbound}) {
      const Acl* acl = fw.AclFor("self", d);
      ASSERT_NE(acl, nullptr);
      int ospf = 0;
      for (const AclRule& r : acl->rules) ospf += r.protocol == kProtoOspf;
      EXPECT_EQ(ospf, 2) << fw.name;
    }
  }
}

TEST(CompileTest, Deterministic) {
  NetworkPolicy a = CompileFixed();
  NetworkPolicy b = CompileFixed();
  ASSERT_EQ(a.firewalls.size(), b.firewalls.size());
  for (size_t i = 0; i < a.firewalls.size(); ++i) {
    EXPECT_EQ(a.firewalls[i].acls, b.firewalls[i].acls);
  }
}

// Removing one rule changes only ACLs on firewalls that its flows traverse.
TEST(CompileTest, ConduitIsolation) {
  CaseStudy cs = LoadCaseStudy("policy_fixed.policyml");
  std::vector<FlowRule> flows = *ExpandRules(cs.spec);
  NetworkPolicy full = *CompileFlows(flows, cs.spec, cs.topology, cs.model, {});
  std::set<std::string> rule_names;
  for (const FlowRule& f : flows) rule_names.insert(f.rule_name);
  for (const std::string& removed : rule_names) {
    std::vector<FlowRule> kept;
    std::set<std::string> touched;
    for (const FlowRule& f : flows) {
      if (f.rule_name != removed) {
        kept.push_back(f);
        continue;
      }
      std::vector<ZonePath> paths =
          *EnumeratePaths(cs.model, f.src_zone, f.dst_zone);
      for (const ZonePath& p : paths) {
        for (const Hop& h : p.hops) touched.insert(h.firewall);
      }
    }
    NetworkPolicy less = *CompileFlows(kept, cs.spec, cs.topology, cs.model, {});
    for (size_t i = 0; i < full.firewalls.size(); ++i) {
      if (touched.count(full.firewalls[i].name)) continue;
      EXPECT_EQ(full.firewalls[i].acls, less.firewalls[i].acls)
          << "removing " << removed << " changed " << full.firewalls[i].name;
    }
  }
}

}  // namespace
}  // namespace forestfw
