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

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "forestfw/render.h"
#include "src/render/protocols.h"

namespace forestfw {
namespace {

constexpr char kHeader[] =
    "INFO Vendor neutral network-level ruleset for ACL: ";
constexpr char kIndent[] = "  ";

std::string Address(const Cidr& cidr) {
  return cidr.prefix_len == 0 ? "any" : cidr.ToString();
}

std::string StateFlags(StateMask state) {
  std::vector<std::string> flags;
  if (state & kStateNew) flags.push_back("NEW");
  if (state & kStateEstablished) flags.push_back("ESTABLISHED");
  return absl::StrJoin(flags, ",");
}

std::string RuleLine(const AclRule& r) {
  const bool ports = r.protocol != kIpWildcard && HasPorts(r.protocol);
  std::string out = absl::StrCat(
      r.action == AclAction::kPermit ? "permit" : "deny", "~",
      ProtocolKeyword(r.protocol), "~from~", Address(r.src), "~to~",
      Address(r.dst), "~sport~", ports ? FormatPortList(r.sport) : "",
      "~dport~", ports ? FormatPortList(r.dport) : "");
  if (r.protocol == kProtoIcmp) {
    absl::StrAppend(&out, "~icmp~", FormatPortList(r.icmp_types));
  }
  absl::StrAppend(&out, "~state~", StateFlags(r.state));
  if (r.log) out += "~log";
  return out;
}

absl::StatusOr<IntervalSet> ParsePortList(std::string_view field) {
  std::string text(absl::StripAsciiWhitespace(std::string(field)));
  if (text.empty()) return IntervalSet();
  if (text.front() != '[' || text.back() != ']') {
    return absl::InvalidArgumentError(
        absl::StrCat("port list '", text, "' is not bracketed"));
  }
  IntervalSet out;
  for (absl::string_view item :
       absl::StrSplit(text.substr(1, text.size() - 2), ',', absl::SkipWhitespace())) {
    std::string value(absl::StripAsciiWhitespace(item));
    // Quoted ranges may use '...' or `...'.
    if (!value.empty() && (value.front() == '\'' || value.front() == '`')) {
      value = value.substr(1);
    }
    if (!value.empty() && value.back() == '\'') value.pop_back();
    std::vector<std::string> bounds = absl::StrSplit(value, '-');
    int64_t lo = 0, hi = 0;
    if (bounds.empty() || bounds.size() > 2 ||
        !absl::SimpleAtoi(bounds[0], &lo) ||
        !absl::SimpleAtoi(bounds.back(), &hi) || lo > hi) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad port range '", value, "'"));
    }
    out.Add({lo, hi});
  }
  return out;
}

absl::StatusOr<Cidr> ParseAddress(const std::string& text) {
  if (text == "any") return Cidr{0, 0};
  return Cidr::Parse(text);
}

absl::StatusOr<AclRule> ParseRuleLine(const std::string& line) {
  std::vector<std::string> f = absl::StrSplit(line, '~');
  auto fail = [&](std::string_view why) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad rule line '", line, "': ", std::string(why)));
  };
  if (f.size() < 12 || f[2] != "from" || f[4] != "to" || f[6] != "sport" ||
      f[8] != "dport") {
    return fail("unexpected field layout");
  }
  AclRule r;
  if (f[0] == "permit") {
    r.action = AclAction::kPermit;
  } else if (f[0] == "deny") {
    r.action = AclAction::kDeny;
  } else {
    return fail("unknown action");
  }
  std::optional<int> protocol = ParseProtocolKeyword(f[1]);
  if (!protocol) return fail("unknown protocol");
  r.protocol = *protocol;
  absl::StatusOr<Cidr> src = ParseAddress(f[3]);
  absl::StatusOr<Cidr> dst = ParseAddress(f[5]);
  if (!src.ok() || !dst.ok()) return fail("bad address");
  r.src = *src;
  r.dst = *dst;
  absl::StatusOr<IntervalSet> sport = ParsePortList(f[7]);
  absl::StatusOr<IntervalSet> dport = ParsePortList(f[9]);
  if (!sport.ok()) return sport.status();
  if (!dport.ok()) return dport.status();
  r.sport = *sport;
  r.dport = *dport;
  size_t i = 10;
  if (f[i] == "icmp") {
    if (i + 1 >= f.size()) return fail("truncated icmp field");
    absl::StatusOr<IntervalSet> types = ParsePortList(f[i + 1]);
    if (!types.ok()) return types.status();
    r.icmp_types = *types;
    i += 2;
  }
  if (i + 1 >= f.size() || f[i] != "state") return fail("missing state");
  for (absl::string_view flag : absl::StrSplit(f[i + 1], ',', absl::SkipEmpty())) {
    if (flag == "NEW") {
      r.state |= kStateNew;
    } else if (flag == "ESTABLISHED") {
      r.state |= kStateEstablished;
    } else {
      return fail("unknown state flag");
    }
  }
  i += 2;
  if (i < f.size()) {
    if (f[i] != "log" || i + 1 != f.size()) return fail("trailing fields");
    r.log = true;
  }
  return r;
}

}  // namespace

std::string FormatPortList(const IntervalSet& ports) {
  std::vector<std::string> items;
  for (const Interval& i : ports) {
    items.push_back(i.lo == i.hi ? absl::StrCat(i.lo)
                                 : absl::StrCat("'", i.lo, "-", i.hi, "'"));
  }
  return absl::StrCat("[", absl::StrJoin(items, ", "), "]");
}

std::string RenderNeutral(const Acl& acl) {
  std::string out = absl::StrCat(kHeader, acl.name, "\n");
  std::string current;
  for (const AclRule& r : acl.rules) {
    bool remark = r.IsDenyAll() ? !r.comment.empty() : r.comment != current;
    if (remark) {
      absl::StrAppend(&out, kIndent, "remark~", r.comment, "\n");
      current = r.comment;
    }
    absl::StrAppend(&out, kIndent, RuleLine(r), "\n");
  }
  return out;
}

std::string RenderNeutralFile(const FirewallConfig& firewall) {
  std::string out;
  for (const Acl& acl : firewall.acls) absl::StrAppend(&out, RenderNeutral(acl));
  return out;
}

absl::StatusOr<std::vector<Acl>> ParseNeutral(std::string_view text) {
  std::vector<Acl> out;
  std::string current;
  bool remark_pending = false;
  int line_no = 0;
  for (absl::string_view raw : absl::StrSplit(std::string(text), '\n')) {
    ++line_no;
    std::string line(absl::StripAsciiWhitespace(raw));
    if (line.empty()) continue;
    if (absl::StartsWith(line, kHeader)) {
      out.push_back(Acl{line.substr(sizeof(kHeader) - 1), {}});
      current.clear();
      remark_pending = false;
      continue;
    }
    if (out.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": rule before ACL header"));
    }
    if (absl::StartsWith(line, "remark~")) {
      current = line.substr(7);
      remark_pending = true;
      continue;
    }
    absl::StatusOr<AclRule> rule = ParseRuleLine(line);
    if (!rule.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ", rule.status().message()));
    }
    if (rule->IsDenyAll()) {
      rule->comment = remark_pending ? current : "";
    } else {
      rule->comment = current;
    }
    remark_pending = false;
    out.back().rules.push_back(*std::move(rule));
  }
  return out;
}

}  // namespace forestfw
