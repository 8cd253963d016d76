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

#include "forestfw/render.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace forestfw {
namespace {

using ::testing::HasSubstr;
using ::testing::Not;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string ReadFixture(const std::string& rel) {
  return ReadFile(std::string(FORESTFW_FIXTURE_DIR) + "/" + rel);
}

std::string ReadGolden(const std::string& name) {
  return ReadFile(std::string(FORESTFW_GOLDEN_DIR) + "/" + name);
}

NetworkPolicy CompileFixed(bool ospf = false) {
  absl::StatusOr<PolicySpec> spec =
      ParsePolicy(ReadFixture("case_study/policy_fixed.policyml"),
                  BuiltinImporter(), "policy_fixed.policyml");
  EXPECT_TRUE(spec.ok()) << spec.status();
  absl::StatusOr<Topology> topology =
      LoadTopology(ReadFixture("case_study/topology.graphml"));
  EXPECT_TRUE(topology.ok()) << topology.status();
  CompileOptions options;
  options.ospf = ospf;
  absl::StatusOr<NetworkPolicy> policy = Compile(*spec, *topology, options);
  EXPECT_TRUE(policy.ok()) << policy.status();
  return *policy;
}

std::vector<std::string> Lines(const std::string& text) {
  return absl::StrSplit(text, '\n', absl::SkipEmpty());
}

TEST(FormatPortListTest, Examples) {
  EXPECT_EQ(FormatPortList(IntervalSet::Point(443)), "[443]");
  EXPECT_EQ(FormatPortList(IntervalSet::Of(0, 65535)), "['0-65535']");
  IntervalSet ftp = IntervalSet::Point(21);
  ftp.Add({24500, 24600});
  EXPECT_EQ(FormatPortList(ftp), "[21, '24500-24600']");
  EXPECT_EQ(FormatPortList(IntervalSet()), "[]");
}

TEST(RenderNeutralTest, EmptyAclIsHeaderAndDeny) {
  Acl acl{"acl_9", {AclRule::DenyAll()}};
  EXPECT_EQ(RenderNeutral(acl),
            "INFO Vendor neutral network-level ruleset for ACL: acl_9\n"
            "  deny~ip~from~any~to~any~sport~~dport~~state~\n");
}

TEST(RenderNeutralTest, IcmpFieldAndStatelessRule) {
  AclRule r;
  r.protocol = kProtoIcmp;
  r.src = *Cidr::Parse("10.0.0.0/29");
  r.dst = *Cidr::Parse("10.0.0.16/29");
  r.icmp_types = IntervalSet::Point(8);
  r.comment = "ping_rule: echo";
  EXPECT_EQ(RenderNeutral(Acl{"a", {r}}),
            "INFO Vendor neutral network-level ruleset for ACL: a\n"
            "  remark~ping_rule: echo\n"
            "  permit~icmp~from~10.0.0.0/29~to~10.0.0.16/29~sport~~dport~"
            "~icmp~[8]~state~\n");
}

// The scada-to-corp inbound list on the interior firewall carries the
// return leg of the HMI rule and the forward leg of the HTTPS pull.
TEST(GoldenTest, InteriorFirewallAclShape) {
  NetworkPolicy policy = CompileFixed();
  const FirewallConfig* r2 = policy.FindFirewall("R2");
  ASSERT_NE(r2, nullptr);
  const Acl* acl = r2->AclFor("eth1", Direction::kInbound);
  ASSERT_NE(acl, nullptr);
  EXPECT_EQ(acl->name, "acl_2");
  std::vector<std::string> rendered = Lines(RenderNeutral(*acl));
  std::set<std::string> have(rendered.begin(), rendered.end());
  for (const std::string& line : Lines(ReadGolden("interior_acl_2.txt"))) {
    EXPECT_TRUE(have.count(line)) << "missing: " << line;
  }
  EXPECT_EQ(rendered.front(), Lines(ReadGolden("interior_acl_2.txt")).front());
  EXPECT_EQ(rendered.back(), "  deny~ip~from~any~to~any~sport~~dport~~state~");
}

TEST(GoldenTest, FullNeutralFileForInteriorFirewall) {
  NetworkPolicy policy = CompileFixed();
  EXPECT_EQ(RenderNeutralFile(*policy.FindFirewall("R2")),
            ReadGolden("R2.neutral.acl"));
}

TEST(ParseNeutralTest, AcceptsBacktickQuotes) {
  absl::StatusOr<std::vector<Acl>> acls = ParseNeutral(
      "INFO Vendor neutral network-level ruleset for ACL: acl_2\n"
      "  remark~r: https\n"
      "  permit~tcp~from~10.0.0.16/29~to~10.0.0.0/29~sport~[`0-65535']~"
      "dport~[443]~state~NEW,ESTABLISHED~log\n");
  ASSERT_TRUE(acls.ok()) << acls.status();
  ASSERT_EQ(acls->size(), 1u);
  const AclRule& r = (*acls)[0].rules.at(0);
  EXPECT_EQ(r.sport, IntervalSet::Of(0, 65535));
  EXPECT_EQ(r.dport, IntervalSet::Point(443));
  EXPECT_EQ(r.state, kStateNew | kStateEstablished);
  EXPECT_TRUE(r.log);
  EXPECT_EQ(r.comment, "r: https");
}

TEST(ParseNeutralTest, RejectsMalformedLines) {
  EXPECT_FALSE(ParseNeutral("  permit~tcp~from~any~to~any\n").ok());
  EXPECT_FALSE(
      ParseNeutral("INFO Vendor neutral network-level ruleset for ACL: a\n"
                   "  allow~tcp~from~any~to~any~sport~~dport~~state~\n")
          .ok());
  EXPECT_FALSE(
      ParseNeutral("INFO Vendor neutral network-level ruleset for ACL: a\n"
                   "  permit~tcp~from~any~to~any~sport~[5-1]~dport~~state~\n")
          .ok());
}

TEST(ParseNeutralTest, RoundTripsCompiledFirewalls) {
  for (bool ospf : {false, true}) {
    NetworkPolicy policy = CompileFixed(ospf);
    for (const FirewallConfig& fw : policy.firewalls) {
      absl::StatusOr<std::vector<Acl>> parsed =
          ParseNeutral(RenderNeutralFile(fw));
      ASSERT_TRUE(parsed.ok()) << parsed.status();
      EXPECT_EQ(*parsed, fw.acls) << fw.name;
    }
  }
}

class RandomAcls {
 public:
  explicit RandomAcls(uint32_t seed) : rng_(seed) {}

  int Uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }

  Cidr RandomCidr() {
    static const char* kPool[] = {"0.0.0.0/0",    "10.0.0.0/29",
                                  "10.0.0.16/29", "10.0.1.0/30",
                                  "10.0.0.3/32",  "198.51.100.0/24",
                                  "10.0.0.0/24"};
    return *Cidr::Parse(kPool[Uniform(0, 6)]);
  }

  IntervalSet RandomPorts() {
    IntervalSet out;
    int n = Uniform(1, 3);
    for (int i = 0; i < n; ++i) {
      int lo = Uniform(0, 70) * (Uniform(0, 1) ? 1 : 900);
      lo = std::min<int>(lo, kMaxPort);
      out.Add({lo, std::min<int64_t>(kMaxPort, lo + Uniform(0, 3) * 7)});
    }
    if (Uniform(0, 5) == 0) out = IntervalSet::Of(0, kMaxPort);
    return out;
  }

  AclRule RandomRule() {
    static const int kProtocols[] = {kProtoTcp, kProtoUdp, kProtoIcmp,
                                     kProtoOspf, kIpWildcard};
    static const char* kComments[] = {"", "a: one", "b: two (z1 to z2)",
                                      "c"};
    AclRule r;
    r.action = Uniform(0, 3) == 0 ? AclAction::kDeny : AclAction::kPermit;
    r.protocol = kProtocols[Uniform(0, 4)];
    r.src = RandomCidr();
    r.dst = RandomCidr();
    if (HasPorts(r.protocol)) {
      r.sport = RandomPorts();
      r.dport = RandomPorts();
    }
    if (r.protocol == kProtoIcmp) {
      r.icmp_types = IntervalSet::Point(Uniform(0, 3) * 4);
      if (Uniform(0, 1)) r.icmp_types.Add({0, 0});
    }
    r.state = static_cast<StateMask>(Uniform(0, 3));
    r.log = Uniform(0, 1);
    r.comment = kComments[Uniform(0, 3)];
    return r;
  }

  Acl RandomAcl(const std::string& name) {
    Acl acl{name, {}};
    int n = Uniform(0, 8);
    for (int i = 0; i < n; ++i) acl.rules.push_back(RandomRule());
    AclRule deny = AclRule::DenyAll();
    if (Uniform(0, 1)) deny.comment = "default";
    acl.rules.push_back(deny);
    return acl;
  }

 private:
  std::mt19937 rng_;
};

TEST(ParseNeutralTest, RoundTripsRandomAcls) {
  RandomAcls gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    FirewallConfig fw{"F", "iptables_like", {}, {}};
    for (int i = 1; i <= 3; ++i) {
      fw.acls.push_back(gen.RandomAcl(absl::StrCat("acl_", i)));
    }
    absl::StatusOr<std::vector<Acl>> parsed =
        ParseNeutral(RenderNeutralFile(fw));
    ASSERT_TRUE(parsed.ok()) << parsed.status();
    ASSERT_EQ(*parsed, fw.acls) << RenderNeutralFile(fw);
  }
}

TEST(DeviceTemplateTest, BuiltinsLoadAndMissingVendorFails) {
  EXPECT_TRUE(DeviceTemplate::Load(kIptablesLike, std::nullopt).ok());
  EXPECT_TRUE(DeviceTemplate::Load(kAsaLike, std::nullopt).ok());
  EXPECT_FALSE(DeviceTemplate::Load("junos_like", std::nullopt).ok());
}

TEST(DeviceTemplateTest, ParseRejectsMissingSections) {
  EXPECT_FALSE(DeviceTemplate::Parse("x", "@@ file_header\nhello\n").ok());
}

TEST(DeviceTemplateTest, DirectoryOverridesBuiltin) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "forestfw_render_test_tmpl";
  fs::create_directories(dir);
  std::string text = ReadFile(std::string(FORESTFW_TEMPLATE_DIR) +
                              "/iptables_like.tmpl");
  size_t at = text.find("COMMIT");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 6, "COMMIT\n# custom footer");
  std::ofstream(dir / "iptables_like.tmpl") << text;

  absl::StatusOr<DeviceTemplate> tmpl =
      DeviceTemplate::Load(kIptablesLike, dir.string());
  ASSERT_TRUE(tmpl.ok()) << tmpl.status();
  NetworkPolicy policy = CompileFixed();
  absl::StatusOr<std::string> out =
      RenderDevice(*policy.FindFirewall("R2"), *tmpl);
  ASSERT_TRUE(out.ok());
  EXPECT_THAT(*out, HasSubstr("# custom footer"));
  fs::remove_all(dir);
}

TEST(RenderDeviceTest, IptablesLinesForInteriorFirewall) {
  NetworkPolicy policy = CompileFixed();
  absl::StatusOr<std::string> out =
      RenderDevice(*policy.FindFirewall("R2"),
                   *DeviceTemplate::Load(kIptablesLike, std::nullopt));
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_THAT(*out, HasSubstr("-A FORWARD -i eth1 -j acl_2\n"));
  EXPECT_THAT(*out, HasSubstr("-A INPUT -j acl_3\n"));
  EXPECT_THAT(*out, HasSubstr("-A OUTPUT -j acl_4\n"));
  EXPECT_THAT(*out,
              HasSubstr("-A acl_2 -p tcp -s 10.0.0.16/29 -d 10.0.0.0/29 "
                        "--dport 443 -m conntrack --ctstate "
                        "NEW,ESTABLISHED -j ACCEPT\n"));
  EXPECT_THAT(*out, HasSubstr("-A acl_2 -j DROP\n"));
}

TEST(RenderDeviceTest, AsaLinesForInteriorFirewall) {
  NetworkPolicy policy = CompileFixed();
  absl::StatusOr<std::string> out =
      RenderDevice(*policy.FindFirewall("R2"),
                   *DeviceTemplate::Load(kAsaLike, std::nullopt));
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_THAT(*out,
              HasSubstr("access-list acl_2 extended permit tcp 10.0.0.16 "
                        "255.255.255.248 10.0.0.0 255.255.255.248 eq 443 "
                        "log\n"));
  EXPECT_THAT(*out, HasSubstr("access-list acl_2 extended deny ip any any\n"));
  EXPECT_THAT(*out, HasSubstr("access-group acl_2 in interface eth1\n"));
}

TEST(RenderDeviceTest, Deterministic) {
  NetworkPolicy a = CompileFixed();
  NetworkPolicy b = CompileFixed();
  for (std::string_view vendor : {kIptablesLike, kAsaLike}) {
    DeviceTemplate tmpl = *DeviceTemplate::Load(vendor, std::nullopt);
    for (size_t i = 0; i < a.firewalls.size(); ++i) {
      EXPECT_EQ(*RenderDevice(a.firewalls[i], tmpl),
                *RenderDevice(b.firewalls[i], tmpl));
    }
  }
}

// Sample headers spanning every zone of the case study plus outside space.
std::vector<HeaderPoint> SampleGrid() {
  const char* kAddrs[] = {"10.0.0.1",     "10.0.0.7",   "10.0.0.17",
                          "10.0.1.2",     "10.0.128.5", "198.51.100.9",
                          "10.255.0.1",   "10.255.0.2", "10.255.0.3",
                          "224.0.0.5",    "192.0.2.1"};
  const int kPorts[] = {0,   20,  21,   22,    53,    80,    123,   443, 514,
                        1521, 8080, 24500, 24600, 24601, 49152, 65535};
  std::vector<HeaderPoint> out;
  for (const char* s : kAddrs) {
    for (const char* d : kAddrs) {
      uint32_t src = *ParseAddress(s), dst = *ParseAddress(d);
      for (int proto : {kProtoTcp, kProtoUdp}) {
        for (int sp : {0, 443, 22, 53, 49152}) {
          for (int dp : kPorts) out.push_back({src, dst, proto, sp, dp, 0});
        }
      }
      for (int type : {0, 3, 8}) {
        out.push_back({src, dst, kProtoIcmp, 0, 0, type});
      }
      out.push_back({src, dst, kProtoOspf, 0, 0, 0});
    }
  }
  return out;
}

void ExpectSameDecisions(const std::vector<Acl>& want,
                         const std::vector<Acl>& got,
                         const std::vector<HeaderPoint>& grid) {
  ASSERT_EQ(want.size(), got.size());
  for (size_t i = 0; i < want.size(); ++i) {
    ASSERT_EQ(want[i].name, got[i].name);
    for (const HeaderPoint& x : grid) {
      for (ConnState state : {ConnState::kNew, ConnState::kEstablished}) {
        ASSERT_EQ(EvalAcl(want[i], x, state).action,
                  EvalAcl(got[i], x, state).action)
            << want[i].name << " at " << FormatAddress(x.src_addr) << ">"
            << FormatAddress(x.dst_addr) << " p" << x.protocol << " "
            << x.sport << ">" << x.dport;
      }
    }
  }
}

TEST(LoadIptablesTest, DecisionEquivalentToNeutral) {
  std::vector<HeaderPoint> grid = SampleGrid();
  DeviceTemplate tmpl = *DeviceTemplate::Load(kIptablesLike, std::nullopt);
  for (bool ospf : {false, true}) {
    NetworkPolicy policy = CompileFixed(ospf);
    for (const FirewallConfig& fw : policy.firewalls) {
      absl::StatusOr<LoadedFirewall> loaded =
          LoadIptables(fw.name, *RenderDevice(fw, tmpl));
      ASSERT_TRUE(loaded.ok()) << loaded.status();
      ExpectSameDecisions(fw.acls, loaded->acls, grid);
      std::set<std::string> want_bind, got_bind;
      for (const InterfaceAssignment& a : fw.assignments) {
        want_bind.insert(absl::StrCat(a.interface, "/",
                                      std::string(DirectionName(a.direction)), "/", a.acl));
      }
      for (const InterfaceAssignment& a : loaded->assignments) {
        got_bind.insert(absl::StrCat(a.interface, "/",
                                     std::string(DirectionName(a.direction)), "/", a.acl));
      }
      EXPECT_EQ(want_bind, got_bind) << fw.name;
    }
  }
}

TEST(LoadIptablesTest, RandomAclsSurviveDeviceRendering) {
  std::vector<HeaderPoint> grid = SampleGrid();
  DeviceTemplate tmpl = *DeviceTemplate::Load(kIptablesLike, std::nullopt);
  RandomAcls gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    FirewallConfig fw{"F", "iptables_like", {gen.RandomAcl("acl_1")},
                      {{"F", "eth0", Direction::kInbound, "acl_1"}}};
    absl::StatusOr<std::string> text = RenderDevice(fw, tmpl);
    ASSERT_TRUE(text.ok()) << text.status();
    absl::StatusOr<LoadedFirewall> loaded = LoadIptables("F", *text);
    ASSERT_TRUE(loaded.ok()) << loaded.status() << "\n" << *text;
    ExpectSameDecisions(fw.acls, loaded->acls, grid);
  }
}

TEST(LocMetricsTest, CountsNonCommentLines) {
  EXPECT_EQ(CountPolicyLoc("// c\n\nservice a { x }\n  // d\nb\n"), 2);
  EXPECT_EQ(CountDeviceLoc("# c\n! d\n\n-A x\naccess-list y\n"), 2);
  LocMetrics m = ComputeLocMetrics("a\nb\n", {"1\n2\n3\n", "4\n"});
  EXPECT_EQ(m.high_level_loc, 2);
  EXPECT_EQ(m.device_loc, 4);
  EXPECT_DOUBLE_EQ(m.ratio, 2.0);
}

TEST(LocMetricsTest, CaseStudyPolicyIsSmallerThanDeviceOutput) {
  std::string policy_text = ReadFixture("case_study/policy_fixed.policyml");
  EXPECT_LE(CountPolicyLoc(policy_text), 100);
  NetworkPolicy policy = CompileFixed();
  std::vector<std::string> devices;
  for (const FirewallConfig& fw : policy.firewalls) {
    devices.push_back(*RenderDevice(
        fw, *DeviceTemplate::Load(fw.vendor, std::nullopt)));
  }
  LocMetrics m = ComputeLocMetrics(policy_text, devices);
  EXPECT_GT(m.ratio, 1.0);
}

TEST(ManifestTest, RoundTrip) {
  NetworkPolicy policy = CompileFixed();
  std::map<std::string, std::string> files;
  for (const FirewallConfig& fw : policy.firewalls) {
    files[absl::StrCat(fw.name, ".neutral.acl")] = RenderNeutralFile(fw);
  }
  std::string manifest = WriteManifest(
      policy, {{"policy", "policy_fixed.policyml"}}, LocMetrics{10, 100, 10});
  EXPECT_THAT(manifest, HasSubstr("\"generator\""));
  absl::StatusOr<NetworkPolicy> back = ReadManifest(
      manifest, [&](const std::string& path) -> absl::StatusOr<std::string> {
        auto it = files.find(path);
        if (it == files.end()) return absl::NotFoundError(path);
        return it->second;
      });
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->flows, policy.flows);
  ASSERT_EQ(back->firewalls.size(), policy.firewalls.size());
  for (size_t i = 0; i < policy.firewalls.size(); ++i) {
    EXPECT_EQ(back->firewalls[i].name, policy.firewalls[i].name);
    EXPECT_EQ(back->firewalls[i].vendor, policy.firewalls[i].vendor);
    EXPECT_EQ(back->firewalls[i].acls, policy.firewalls[i].acls);
    EXPECT_EQ(back->firewalls[i].assignments, policy.firewalls[i].assignments);
  }
  ASSERT_EQ(back->model.zones.size(), policy.model.zones.size());
  EXPECT_EQ(back->model.attachments.size(), policy.model.attachments.size());
  EXPECT_EQ(back->model.firewall_zone, policy.model.firewall_zone);
  EXPECT_EQ(WriteManifest(*back, {{"policy", "policy_fixed.policyml"}},
                          LocMetrics{10, 100, 10}),
            manifest);
}

TEST(ManifestTest, RejectsGarbage) {
  auto none = [](const std::string&) -> absl::StatusOr<std::string> {
    return absl::NotFoundError("x");
  };
  EXPECT_FALSE(ReadManifest("not json", none).ok());
  EXPECT_FALSE(ReadManifest("{\"zones\": 3}", none).ok());
}

}  // namespace
}  // namespace forestfw
