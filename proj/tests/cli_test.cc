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

#include "tools/cli.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_replace.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace forestfw {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;
using ::testing::Not;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "forestfw");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Fixture(const std::string& rel) {
  return std::string(FORESTFW_FIXTURE_DIR) + "/case_study/" + rel;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::path(::testing::TempDir()) /
            ("forestfw_cli_" +
             std::string(::testing::UnitTest::GetInstance()
                             ->current_test_info()
                             ->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  // Copies the case study next to a modified policy so relative model paths
  // still resolve.
  std::string WritePolicy(const std::string& text) {
    fs::copy_file(Fixture("zone_conduit.graphml"),
                  root_ / "zone_conduit.graphml",
                  fs::copy_options::overwrite_existing);
    std::ofstream(root_ / "policy.policyml") << text;
    return (root_ / "policy.policyml").string();
  }

  std::vector<std::string> CompileArgs(const std::string& out) {
    return {"compile", "--policy", Fixture("policy_fixed.policyml"),
            "--topology", Fixture("topology.graphml"), "--out", out};
  }

  fs::path root_;
};

std::set<std::string> Listing(const fs::path& dir) {
  std::set<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    out.insert(entry.path().filename().string());
  }
  return out;
}

TEST_F(CliTest, CheckPublishedPolicyReportsOverlap) {
  CliRun r = Cli({"check", "--policy", Fixture("policy.policyml"), "--topology",
               Fixture("topology.graphml")});
  EXPECT_EQ(r.code, kExitFindings);
  EXPECT_THAT(r.out, HasSubstr("file_transfer_rule and web_rule"));
  EXPECT_THAT(r.out, HasSubstr("dport=80"));
}

TEST_F(CliTest, CheckFixedPolicyPasses) {
  CliRun r = Cli({"check", "--policy", Fixture("policy_fixed.policyml"),
               "--topology", Fixture("topology.graphml"), "--best-practice",
               Fixture("bestpractice/scada_baseline.policyml")});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
}

TEST_F(CliTest, CheckStrictBestPracticeFails) {
  CliRun r = Cli({"check", "--policy", Fixture("policy_fixed.policyml"),
               "--topology", Fixture("topology.graphml"), "--best-practice",
               Fixture("bestpractice/scada_strict.policyml")});
  EXPECT_EQ(r.code, kExitFindings);
  EXPECT_THAT(r.out, HasSubstr("best practice"));
}

TEST_F(CliTest, CheckEmitsAlloy) {
  CliRun r = Cli({"check", "--policy", Fixture("policy_fixed.policyml"),
               "--topology", Fixture("topology.graphml"), "--emit-alloy"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_THAT(r.out, HasSubstr("assert no_rule_overlaps"));
}

TEST_F(CliTest, UsageAndIoErrors) {
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"check", "--policy", "x"}).code, kExitUsage);
  EXPECT_EQ(Cli({"check", "--policy", (root_ / "missing").string(),
                 "--topology", Fixture("topology.graphml")})
                .code,
            kExitUsage);
  EXPECT_EQ(Cli({"check", "--policy", Fixture("policy_fixed.policyml"),
                 "--topology", (root_ / "missing.graphml").string()})
                .code,
            kExitUsage);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, MissingDeclaredModelIsIoError) {
  std::string policy = WritePolicy(ReadFile(Fixture("policy_fixed.policyml")));
  fs::remove(root_ / "zone_conduit.graphml");
  EXPECT_EQ(Cli({"check", "--policy", policy, "--topology",
                 Fixture("topology.graphml")})
                .code,
            kExitUsage);
}

TEST_F(CliTest, CompileWritesAllOutputs) {
  fs::path out = root_ / "out";
  CliRun r = Cli(CompileArgs(out.string()));
  ASSERT_EQ(r.code, kExitOk) << r.out << r.err;
  std::set<std::string> files = Listing(out);
  std::set<std::string> expected = {"manifest.json", "zone_conduit.dot",
                                    "zone_firewall.dot"};
  for (const char* fw : {"GW", "R1", "R2"}) {
    for (const char* suffix : {".neutral.acl", ".iptables.txt", ".asa.txt"}) {
      expected.insert(std::string(fw) + suffix);
    }
  }
  EXPECT_EQ(files, expected);
  EXPECT_FALSE(fs::exists(root_ / "out.partial"));
  EXPECT_THAT(r.out, HasSubstr("ratio"));
}

TEST_F(CliTest, CompileIsDeterministic) {
  ASSERT_EQ(Cli(CompileArgs((root_ / "a").string())).code, kExitOk);
  ASSERT_EQ(Cli(CompileArgs((root_ / "b").string())).code, kExitOk);
  ASSERT_EQ(Listing(root_ / "a"), Listing(root_ / "b"));
  for (const std::string& name : Listing(root_ / "a")) {
    EXPECT_EQ(ReadFile(root_ / "a" / name), ReadFile(root_ / "b" / name))
        << name;
  }
}

TEST_F(CliTest, FailedCompileWritesNothing) {
  fs::path out = root_ / "out";
  CliRun r = Cli({"compile", "--policy", Fixture("policy.policyml"), "--topology",
               Fixture("topology.graphml"), "--out", out.string()});
  EXPECT_EQ(r.code, kExitFindings);
  EXPECT_FALSE(fs::exists(out));

  // An earlier good output survives a failed run untouched.
  ASSERT_EQ(Cli(CompileArgs(out.string())).code, kExitOk);
  std::string before = ReadFile(out / "manifest.json");
  Cli({"compile", "--policy", Fixture("policy.policyml"), "--topology",
       Fixture("topology.graphml"), "--out", out.string()});
  EXPECT_EQ(ReadFile(out / "manifest.json"), before);
}

TEST_F(CliTest, EmptyRuleGroupGivesDenyOnlyConfigs) {
  std::string text = ReadFile(Fixture("policy_fixed.policyml"));
  text += "\nrule_group nothing { }\npolicy empty_policy { nothing; verify_rules }\n";
  text = absl::StrReplaceAll(
      text, {{"policy company_policy { security_policy;  verify_rules}", ""}});
  std::string policy = WritePolicy(text);
  fs::path out = root_ / "out";
  CliRun r = Cli({"compile", "--policy", policy, "--topology",
               Fixture("topology.graphml"), "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.out << r.err;
  std::string neutral = ReadFile(out / "R2.neutral.acl");
  EXPECT_THAT(neutral, Not(HasSubstr("permit")));
  EXPECT_THAT(neutral, HasSubstr("deny~ip~from~any~to~any"));

  CliRun sim = Cli({"simulate", "--out", out.string(), "--scan-ports", ""});
  EXPECT_EQ(sim.code, kExitOk) << sim.out;
}

TEST_F(CliTest, SimulatePassesOnFixture) {
  fs::path out = root_ / "out";
  ASSERT_EQ(Cli(CompileArgs(out.string())).code, kExitOk);
  CliRun r = Cli({"simulate", "--out", out.string(), "--scan-ports",
               "0-1023,8080,24500-24600"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_THAT(r.out, HasSubstr("PASS hmi_rule"));
  EXPECT_THAT(r.out, HasSubstr("0 leak(s)"));
}

TEST_F(CliTest, SimulateReportsFaultInjectedAcl) {
  fs::path out = root_ / "out";
  ASSERT_EQ(Cli(CompileArgs(out.string())).code, kExitOk);
  std::string neutral = ReadFile(out / "R2.neutral.acl");
  const std::string line =
      "  permit~tcp~from~10.0.0.16/29~to~10.0.0.0/29~sport~['0-65535']~"
      "dport~[443]~state~NEW,ESTABLISHED~log\n";
  ASSERT_NE(neutral.find(line), std::string::npos);
  neutral.erase(neutral.find(line), line.size());
  std::ofstream(out / "R2.neutral.acl") << neutral;
  CliRun r = Cli({"simulate", "--out", out.string()});
  EXPECT_EQ(r.code, kExitFindings);
  EXPECT_THAT(r.out, HasSubstr("FAIL web_rule z3->z1:iana_services.https"));
}

TEST_F(CliTest, SimulateWithoutManifestIsIoError) {
  EXPECT_EQ(Cli({"simulate", "--out", root_.string()}).code, kExitUsage);
}

TEST_F(CliTest, GraphWritesDotFiles) {
  fs::path out = root_ / "graphs";
  CliRun r = Cli({"graph", "--topology", Fixture("topology.graphml"), "--out",
               out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Listing(out),
            (std::set<std::string>{"zone_conduit.dot", "zone_firewall.dot"}));
  EXPECT_THAT(ReadFile(out / "zone_conduit.dot"), HasSubstr("\"fwz3\""));

  EXPECT_EQ(Cli({"graph", "--topology", (root_ / "nope").string(), "--out",
                 out.string()})
                .code,
            kExitUsage);
}

TEST_F(CliTest, GraphOfEmptyTopology) {
  std::ofstream(root_ / "empty.graphml")
      << "<?xml version=\"1.0\"?>\n<graphml "
         "xmlns=\"http://graphml.graphdrawing.org/xmlns\"><graph "
         "edgedefault=\"undirected\"/></graphml>\n";
  fs::path out = root_ / "graphs";
  CliRun r = Cli({"graph", "--topology", (root_ / "empty.graphml").string(),
               "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(ReadFile(out / "zone_conduit.dot"), Not(HasSubstr("--")));
}

TEST_F(CliTest, TemplateOverride) {
  fs::create_directories(root_ / "tmpl");
  std::string text =
      ReadFile(std::string(FORESTFW_TEMPLATE_DIR) + "/asa_like.tmpl");
  std::ofstream(root_ / "tmpl" / "asa_like.tmpl") << text << "! site build\n";
  fs::path out = root_ / "out";
  std::vector<std::string> args = CompileArgs(out.string());
  args.insert(args.end(), {"--templates", (root_ / "tmpl").string()});
  ASSERT_EQ(Cli(args).code, kExitOk);
  EXPECT_THAT(ReadFile(out / "R1.asa.txt"), HasSubstr("! site build"));
}

}  // namespace
}  // namespace forestfw
