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

#include "forestfw/checker.h"

#include <fstream>
#include <random>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace forestfw {
namespace {

using ::testing::HasSubstr;
using ::testing::IsEmpty;
using ::testing::SizeIs;

std::string ReadFixture(const std::string& rel) {
  std::ifstream in(std::string(FORESTFW_FIXTURE_DIR) + "/" + rel);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<FlowRule> ExpandFixture(const std::string& rel) {
  absl::StatusOr<PolicySpec> spec =
      ParsePolicy(ReadFixture(rel), BuiltinImporter(), rel);
  EXPECT_TRUE(spec.ok()) << spec.status();
  absl::StatusOr<std::vector<FlowRule>> flows = ExpandRules(*spec);
  EXPECT_TRUE(flows.ok()) << flows.status();
  return *flows;
}

Service Tcp(std::string name, IntervalSet sport, IntervalSet dport) {
  Service s;
  s.name = std::move(name);
  s.protocol = kProtoTcp;
  s.source_ports = std::move(sport);
  s.dest_ports = std::move(dport);
  return s;
}

TEST(ServiceIntersectionTest, DisjointPortsGiveNothing) {
  Service http = Tcp("http", IntervalSet::Of(0, 65535), IntervalSet::Point(80));
  Service custom =
      Tcp("custom_http", IntervalSet::Of(0, 65535), IntervalSet::Point(8080));
  EXPECT_FALSE(ServiceIntersection(http, custom).has_value());
}

TEST(ServiceIntersectionTest, RangesIntersect) {
  Service a = Tcp("a", IntervalSet::Of(0, 65535), IntervalSet::Of(80, 90));
  Service b = Tcp("b", IntervalSet::Of(0, 65535), IntervalSet::Of(85, 100));
  std::optional<Service> c = ServiceIntersection(a, b);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->dest_ports, IntervalSet::Of(85, 90));
  EXPECT_EQ(c->source_ports, IntervalSet::Of(0, 65535));
}

TEST(ServiceIntersectionTest, ProtocolsMustAgree) {
  Service tcp = Tcp("t", IntervalSet::Of(0, 65535), IntervalSet::Point(53));
  Service udp = tcp;
  udp.protocol = kProtoUdp;
  EXPECT_FALSE(ServiceIntersection(tcp, udp).has_value());
  Service any;
  any.protocol = kAnyProtocol;
  EXPECT_EQ(ServiceIntersection(any, udp), udp);
}

TEST(RuleOverlapTest, CaseStudyHasExactlyOneOverlap) {
  std::vector<FlowRule> flows =
      ExpandFixture("case_study/policy.policyml");
  std::vector<OverlapReport> reports = FindRuleOverlaps(flows);
  ASSERT_THAT(reports, SizeIs(1));
  const OverlapReport& r = reports[0];
  EXPECT_EQ(r.kind, OverlapKind::kHighLevelOverlap);
  EXPECT_EQ(r.rule_a, "file_transfer_rule");
  EXPECT_EQ(r.rule_b, "web_rule");
  ASSERT_THAT(r.shared, SizeIs(1));
  EXPECT_EQ(r.shared[0].src_zone, "z3");
  EXPECT_EQ(r.shared[0].dst_zone, "z1");
  EXPECT_EQ(r.shared[0].service.protocol, kProtoTcp);
  EXPECT_EQ(r.shared[0].service.dest_ports, IntervalSet::Point(80));
  EXPECT_EQ(r.witness.dport, IntervalSet::Point(80));
  EXPECT_THAT(r.Message(), HasSubstr("z3 -> z1"));
}

TEST(RuleOverlapTest, FixedPolicyHasNone) {
  EXPECT_THAT(FindRuleOverlaps(ExpandFixture("case_study/policy_fixed.policyml")),
              IsEmpty());
}

TEST(RuleOverlapTest, SameRuleNeverOverlapsItself) {
  Service s = Tcp("s", IntervalSet::Of(0, 65535), IntervalSet::Point(80));
  std::vector<FlowRule> flows = {{"r", "a", "b", s}, {"r", "a", "b", s}};
  EXPECT_THAT(FindRuleOverlaps(flows), IsEmpty());
}

// Small grid on which every generated service lives, so point enumeration
// is an exact oracle.
constexpr int kGridPorts = 16;
constexpr int kGridIcmp = 8;
const int kProtocols[] = {kProtoIcmp, kProtoTcp, kProtoUdp};

IntervalSet RandomRange(std::mt19937& rng, int limit) {
  std::uniform_int_distribution<int> d(0, limit - 1);
  int a = d(rng), b = d(rng);
  return IntervalSet::Of(std::min(a, b), std::max(a, b));
}

Service RandomService(std::mt19937& rng) {
  Service s;
  s.name = "s";
  s.protocol = kProtocols[rng() % 3];
  if (HasPorts(s.protocol)) {
    s.source_ports = RandomRange(rng, kGridPorts);
    s.dest_ports = RandomRange(rng, kGridPorts);
  } else {
    s.icmp_types = RandomRange(rng, kGridIcmp);
  }
  return s;
}

bool SharePoint(const Service& a, const Service& b) {
  for (int proto : kProtocols) {
    for (int sp = 0; sp < kGridPorts; ++sp) {
      for (int dp = 0; dp < kGridPorts; ++dp) {
        for (int t = 0; t < kGridIcmp; ++t) {
          HeaderPoint x{0, 0, proto, HasPorts(proto) ? sp : 0,
                        HasPorts(proto) ? dp : 0,
                        proto == kProtoIcmp ? t : 0};
          if (Matches(a.ToPredicate(), x) && Matches(b.ToPredicate(), x)) {
            return true;
          }
        }
      }
    }
  }
  return false;
}

TEST(RuleOverlapTest, AgreesWithPointEnumeration) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    Service a = RandomService(rng);
    Service b = RandomService(rng);
    std::vector<FlowRule> flows = {{"ra", "x", "y", a}, {"rb", "x", "y", b}};
    EXPECT_EQ(!FindRuleOverlaps(flows).empty(), SharePoint(a, b))
        << a.Describe() << " vs " << b.Describe();
  }
}

AclRule TcpRule(AclAction action, std::string src, std::string dst,
                IntervalSet dport, StateMask state = kStateAny) {
  AclRule r;
  r.action = action;
  r.protocol = kProtoTcp;
  r.src = *Cidr::Parse(src);
  r.dst = *Cidr::Parse(dst);
  r.sport = IntervalSet::Of(0, kMaxPort);
  r.dport = std::move(dport);
  r.state = state;
  return r;
}

TEST(AclAnomalyTest, DuplicatePermitIsRedundant) {
  AclRule r = TcpRule(AclAction::kPermit, "10.0.0.0/29", "10.0.0.16/29",
                      IntervalSet::Point(443));
  Acl acl{"acl_1", {r, r, AclRule::DenyAll()}};
  std::vector<OverlapReport> out = FindAclAnomalies(acl);
  ASSERT_THAT(out, SizeIs(1));
  EXPECT_EQ(out[0].kind, OverlapKind::kAclRedundancy);
  EXPECT_EQ(out[0].rule_a, "acl_1#2");
  EXPECT_EQ(out[0].rule_b, "acl_1#1");
}

TEST(AclAnomalyTest, PermitBehindDenyIsShadowed) {
  Acl acl{"acl_1",
          {TcpRule(AclAction::kDeny, "10.0.0.0/24", "0.0.0.0/0",
                   IntervalSet::Of(0, kMaxPort)),
           TcpRule(AclAction::kPermit, "10.0.0.0/29", "10.0.0.16/29",
                   IntervalSet::Point(443))}};
  std::vector<OverlapReport> out = FindAclAnomalies(acl);
  ASSERT_THAT(out, SizeIs(1));
  EXPECT_EQ(out[0].kind, OverlapKind::kAclShadow);
}

TEST(AclAnomalyTest, TerminalDenyAndStateSplitAreClean) {
  Acl acl{"acl_1",
          {TcpRule(AclAction::kPermit, "10.0.0.0/29", "10.0.0.16/29",
                   IntervalSet::Point(443), kStateNew | kStateEstablished),
           TcpRule(AclAction::kPermit, "10.0.0.16/29", "10.0.0.0/29",
                   IntervalSet::Of(0, kMaxPort), kStateEstablished),
           AclRule::DenyAll()}};
  EXPECT_THAT(FindAclAnomalies(acl), IsEmpty());
}

TEST(AclAnomalyTest, StrictContainmentIsDetected) {
  Acl acl{"acl_1",
          {TcpRule(AclAction::kPermit, "10.0.0.0/29", "10.0.0.16/29",
                   IntervalSet::Of(80, 90)),
           TcpRule(AclAction::kPermit, "10.0.0.0/30", "10.0.0.16/29",
                   IntervalSet::Of(85, 86))}};
  EXPECT_THAT(FindAclAnomalies(acl), SizeIs(1));
}

// Every generated rule lies inside 10.0.0.0/29, ports 0-7, icmp 0-3.
constexpr uint32_t kBase = 0x0A000000;
constexpr int kAclPorts = 8;
constexpr int kAclIcmp = 4;

AclRule RandomAclRule(std::mt19937& rng) {
  AclRule r;
  r.action = rng() % 3 == 0 ? AclAction::kDeny : AclAction::kPermit;
  auto cidr = [&] {
    int len = 29 + static_cast<int>(rng() % 4);
    uint32_t size = 1u << (32 - len);
    uint32_t offset = (rng() % (8 / size)) * size;
    return Cidr{kBase + offset, len};
  };
  r.src = cidr();
  r.dst = cidr();
  r.protocol = kProtocols[rng() % 3];
  if (HasPorts(r.protocol)) {
    r.sport = RandomRange(rng, kAclPorts);
    r.dport = RandomRange(rng, kAclPorts);
  } else {
    r.icmp_types = RandomRange(rng, kAclIcmp);
  }
  r.state = static_cast<StateMask>(rng() % 4);
  return r;
}

template <typename Fn>
void ForEachAclPoint(Fn fn) {
  for (uint32_t s = 0; s < 8; ++s) {
    for (uint32_t d = 0; d < 8; ++d) {
      for (int proto : kProtocols) {
        int ports = HasPorts(proto) ? kAclPorts : 1;
        int types = proto == kProtoIcmp ? kAclIcmp : 1;
        for (int sp = 0; sp < ports; ++sp) {
          for (int dp = 0; dp < ports; ++dp) {
            for (int t = 0; t < types; ++t) {
              for (ConnState st : {ConnState::kNew, ConnState::kEstablished}) {
                fn(HeaderPoint{kBase + s, kBase + d, proto, sp, dp, t}, st);
              }
            }
          }
        }
      }
    }
  }
}

TEST(AclAnomalyTest, AgreesWithPointEnumeration) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    Acl acl{"acl_x", {}};
    int n = 2 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) acl.rules.push_back(RandomAclRule(rng));
    // Bias towards containment by copying an earlier rule with a narrower
    // destination.
    if (rng() % 2) {
      AclRule copy = acl.rules[rng() % acl.rules.size()];
      copy.dst = Cidr{copy.dst.network, 32};
      acl.rules.push_back(copy);
    }

    std::map<size_t, OverlapKind> expected;
    for (size_t i = 0; i < acl.rules.size(); ++i) {
      bool any = false, by_permit = true, by_any = true;
      ForEachAclPoint([&](const HeaderPoint& x, ConnState st) {
        if (!acl.rules[i].Matches(x, st)) return;
        any = true;
        bool permit_hit = false, hit = false;
        for (size_t j = 0; j < i; ++j) {
          if (!acl.rules[j].Matches(x, st)) continue;
          hit = true;
          if (acl.rules[j].action == AclAction::kPermit) permit_hit = true;
        }
        by_permit = by_permit && permit_hit;
        by_any = by_any && hit;
      });
      if (!any || i == 0) continue;
      if (acl.rules[i].action == AclAction::kPermit && by_permit) {
        expected[i] = OverlapKind::kAclRedundancy;
      } else if (by_any) {
        expected[i] = OverlapKind::kAclShadow;
      }
    }

    std::map<size_t, OverlapKind> actual;
    for (const OverlapReport& r : FindAclAnomalies(acl)) {
      size_t index = std::stoul(r.rule_a.substr(r.rule_a.find('#') + 1)) - 1;
      actual[index] = r.kind;
    }
    EXPECT_EQ(actual, expected) << "trial " << trial;
  }
}

TEST(AlloyExportTest, DeclaresSignaturesAndCheck) {
  absl::StatusOr<PolicySpec> spec =
      ParsePolicy(ReadFixture("case_study/policy.policyml"), BuiltinImporter(),
                  "policy.policyml");
  ASSERT_TRUE(spec.ok());
  std::vector<FlowRule> flows = *ExpandRules(*spec);
  std::string als = EmitAlloy(*spec, flows);
  EXPECT_THAT(als, HasSubstr("abstract sig Service {"));
  EXPECT_THAT(als, HasSubstr("one sig SecurityPolicy { rules: some PolicyRule }"));
  EXPECT_THAT(als, HasSubstr("SecurityPolicy.rules = PolicyRule"));
  EXPECT_THAT(als, HasSubstr("check no_rule_overlaps"));
  EXPECT_EQ(als, EmitAlloy(*spec, flows));
}

}  // namespace
}  // namespace forestfw
