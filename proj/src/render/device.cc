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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_replace.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "forestfw/render.h"
#include "src/render/protocols.h"

namespace forestfw {
namespace {

const std::map<std::string_view, std::string_view>& BuiltinTemplates() {
  static const auto* const kTemplates =
      new std::map<std::string_view, std::string_view>{
#include "builtin_templates.inc"
      };
  return *kTemplates;
}

constexpr const char* kRequiredSections[] = {
    "file_header", "chain_decl",      "acl_header",       "remark",
    "permit",      "permit_log",      "deny",             "deny_log",
    "binding_in",  "binding_self_in", "binding_self_out", "file_footer"};

const IntervalSet& FullPorts() {
  static const IntervalSet* const kFull = new IntervalSet(IntervalSet::Of(0, kMaxPort));
  return *kFull;
}

const IntervalSet& FullIcmp() {
  static const IntervalSet* const kFull =
      new IntervalSet(IntervalSet::Of(0, kMaxIcmpType));
  return *kFull;
}

// iptables match text; ends in a space when non-empty.
std::vector<std::string> IptablesMatches(const AclRule& r) {
  std::string common;
  if (r.protocol != kIpWildcard) {
    absl::StrAppend(&common, "-p ", ProtocolKeyword(r.protocol), " ");
  }
  if (r.src.prefix_len > 0) absl::StrAppend(&common, "-s ", r.src.ToString(), " ");
  if (r.dst.prefix_len > 0) absl::StrAppend(&common, "-d ", r.dst.ToString(), " ");
  if (r.protocol != kIpWildcard && HasPorts(r.protocol)) {
    auto spec = [](const IntervalSet& ports) {
      std::vector<std::string> items;
      for (const Interval& i : ports) {
        items.push_back(i.lo == i.hi ? absl::StrCat(i.lo)
                                     : absl::StrCat(i.lo, ":", i.hi));
      }
      return absl::StrJoin(items, ",");
    };
    bool sport = r.sport != FullPorts(), dport = r.dport != FullPorts();
    bool multi = (sport && r.sport.intervals().size() > 1) ||
                 (dport && r.dport.intervals().size() > 1);
    if (multi) common += "-m multiport ";
    if (sport) {
      absl::StrAppend(&common, multi ? "--sports " : "--sport ", spec(r.sport), " ");
    }
    if (dport) {
      absl::StrAppend(&common, multi ? "--dports " : "--dport ", spec(r.dport), " ");
    }
  }
  std::string state;
  if (r.state != kStateAny) {
    std::vector<std::string> flags;
    if (r.state & kStateNew) flags.push_back("NEW");
    if (r.state & kStateEstablished) flags.push_back("ESTABLISHED");
    state = absl::StrCat("-m conntrack --ctstate ", absl::StrJoin(flags, ","), " ");
  }
  if (r.protocol == kProtoIcmp && r.icmp_types != FullIcmp()) {
    std::vector<std::string> out;
    for (const Interval& i : r.icmp_types) {
      for (int64_t t = i.lo; t <= i.hi; ++t) {
        out.push_back(absl::StrCat(common, "--icmp-type ", t, " ", state));
      }
    }
    return out;
  }
  return {common + state};
}

std::string AsaAddress(const Cidr& c) {
  if (c.prefix_len == 0) return "any";
  if (c.prefix_len == 32) return absl::StrCat("host ", FormatAddress(c.network));
  uint32_t mask = ~uint32_t{0} << (32 - c.prefix_len);
  return absl::StrCat(FormatAddress(c.network), " ", FormatAddress(mask));
}

std::string AsaPort(const Interval& i) {
  if (i.lo == 0 && i.hi == kMaxPort) return "";
  if (i.lo == i.hi) return absl::StrCat(" eq ", i.lo);
  return absl::StrCat(" range ", i.lo, " ", i.hi);
}

// Established-only rules have no ASA equivalent; the device's connection
// state admits that traffic, so they render to nothing.
std::vector<std::string> AsaMatches(const AclRule& r) {
  if (r.state == kStateEstablished) return {};
  std::string proto = ProtocolKeyword(r.protocol);
  std::string src = AsaAddress(r.src), dst = AsaAddress(r.dst);
  std::vector<std::string> out;
  if (r.protocol != kIpWildcard && HasPorts(r.protocol)) {
    for (const Interval& s : r.sport) {
      for (const Interval& d : r.dport) {
        out.push_back(absl::StrCat(proto, " ", src, AsaPort(s), " ", dst, AsaPort(d)));
      }
    }
  } else if (r.protocol == kProtoIcmp && r.icmp_types != FullIcmp()) {
    for (const Interval& i : r.icmp_types) {
      for (int64_t t = i.lo; t <= i.hi; ++t) {
        out.push_back(absl::StrCat(proto, " ", src, " ", dst, " ", t));
      }
    }
  } else {
    out.push_back(absl::StrCat(proto, " ", src, " ", dst));
  }
  return out;
}

// Splits on whitespace, keeping double-quoted strings whole.
std::vector<std::string> ShellWords(std::string_view line) {
  std::vector<std::string> out;
  std::string word;
  bool quoted = false, any = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      any = true;
    } else if (!quoted && (c == ' ' || c == '\t')) {
      if (any) out.push_back(word);
      word.clear();
      any = false;
    } else {
      word.push_back(c);
      any = true;
    }
  }
  if (any) out.push_back(word);
  return out;
}

absl::StatusOr<IntervalSet> ParseIptablesPorts(const std::string& text) {
  IntervalSet out;
  for (absl::string_view item : absl::StrSplit(text, ',')) {
    std::vector<std::string> bounds = absl::StrSplit(item, ':');
    int64_t lo = 0, hi = 0;
    if (bounds.size() > 2 || !absl::SimpleAtoi(bounds[0], &lo) ||
        !absl::SimpleAtoi(bounds.back(), &hi) || lo > hi) {
      return absl::InvalidArgumentError(absl::StrCat("bad port spec '", text, "'"));
    }
    out.Add({lo, hi});
  }
  return out;
}

}  // namespace

absl::StatusOr<DeviceTemplate> DeviceTemplate::Parse(std::string_view vendor,
                                                     std::string_view text) {
  DeviceTemplate out;
  out.vendor_ = std::string(vendor);
  std::string* section = nullptr;
  for (absl::string_view line : absl::StrSplit(std::string(text), '\n')) {
    if (absl::StartsWith(line, "@@ ")) {
      std::string name(absl::StripAsciiWhitespace(line.substr(3)));
      section = &out.sections_[name];
      continue;
    }
    if (section == nullptr) continue;  // preamble
    absl::StrAppend(section, line, "\n");
  }
  for (auto& [name, body] : out.sections_) {
    // The split leaves one spurious newline after the final section.
    while (absl::EndsWith(body, "\n\n")) body.pop_back();
    if (body == "\n") body.clear();
  }
  for (const char* required : kRequiredSections) {
    if (!out.sections_.count(required)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "template '", std::string(vendor), "' lacks section '", required, "'"));
    }
  }
  return out;
}

absl::StatusOr<DeviceTemplate> DeviceTemplate::Load(
    std::string_view vendor, const std::optional<std::string>& dir) {
  if (dir) {
    std::filesystem::path path =
        std::filesystem::path(*dir) / absl::StrCat(std::string(vendor), ".tmpl");
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::ostringstream text;
      text << in.rdbuf();
      return Parse(vendor, text.str());
    }
  }
  auto it = BuiltinTemplates().find(vendor);
  if (it == BuiltinTemplates().end()) {
    return absl::NotFoundError(
        absl::StrCat("no template for vendor '", std::string(vendor), "'"));
  }
  return Parse(vendor, it->second);
}

std::string DeviceTemplate::Fill(
    std::string_view section,
    const std::map<std::string, std::string>& slots) const {
  auto it = sections_.find(std::string(section));
  if (it == sections_.end()) return "";
  std::vector<std::pair<std::string, std::string>> replacements;
  for (const auto& [key, value] : slots) {
    replacements.push_back({absl::StrCat("{", key, "}"), value});
  }
  return absl::StrReplaceAll(it->second, replacements);
}

absl::StatusOr<std::string> RenderDevice(const FirewallConfig& firewall,
                                         const DeviceTemplate& tmpl) {
  std::vector<std::string> (*matcher)(const AclRule&) = nullptr;
  if (tmpl.vendor() == kIptablesLike) {
    matcher = IptablesMatches;
  } else if (tmpl.vendor() == kAsaLike) {
    matcher = AsaMatches;
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown vendor '", tmpl.vendor(), "'"));
  }
  std::string out = tmpl.Fill("file_header", {{"firewall", firewall.name},
                                               {"vendor", tmpl.vendor()}});
  for (const Acl& acl : firewall.acls) {
    out += tmpl.Fill("chain_decl", {{"acl", acl.name}});
  }
  for (const Acl& acl : firewall.acls) {
    const InterfaceAssignment* binding = nullptr;
    for (const InterfaceAssignment& a : firewall.assignments) {
      if (a.acl == acl.name) binding = &a;
    }
    out += tmpl.Fill(
        "acl_header",
        {{"acl", acl.name},
         {"interface", binding ? binding->interface : "unassigned"},
         {"direction",
          binding ? std::string(DirectionName(binding->direction)) : ""}});
    std::string current;
    for (size_t i = 0; i < acl.rules.size(); ++i) {
      const AclRule& r = acl.rules[i];
      if (!r.comment.empty() && r.comment != current) {
        out += tmpl.Fill("remark", {{"acl", acl.name}, {"text", r.comment}});
        current = r.comment;
      }
      std::string section = r.action == AclAction::kPermit ? "permit" : "deny";
      if (r.log) section += "_log";
      std::string tag = absl::StrCat(acl.name, "#", i + 1);
      for (const std::string& match : matcher(r)) {
        out += tmpl.Fill(section,
                         {{"acl", acl.name}, {"match", match}, {"tag", tag}});
      }
    }
  }
  for (const InterfaceAssignment& a : firewall.assignments) {
    std::string section = "binding_in";
    if (a.interface == kSelfInterface) {
      section = a.direction == Direction::kInbound ? "binding_self_in"
                                                   : "binding_self_out";
    }
    out += tmpl.Fill(section, {{"acl", a.acl}, {"interface", a.interface}});
  }
  out += tmpl.Fill("file_footer", {{"firewall", firewall.name}});
  return out;
}

absl::StatusOr<LoadedFirewall> LoadIptables(std::string_view firewall,
                                            std::string_view text) {
  LoadedFirewall out;
  std::map<std::string, size_t> chains;
  std::string comment;
  bool pending_log = false;
  int line_no = 0;
  auto error = [&](const std::string& what) {
    return absl::InvalidArgumentError(absl::StrCat("line ", line_no, ": ", what));
  };
  for (absl::string_view raw : absl::StrSplit(std::string(text), '\n')) {
    ++line_no;
    std::string line(absl::StripAsciiWhitespace(raw));
    if (line.empty() || line == "COMMIT" || line.front() == '*') continue;
    if (line.front() == '#') {
      comment = std::string(absl::StripAsciiWhitespace(line.substr(1)));
      continue;
    }
    std::vector<std::string> words = ShellWords(line);
    if (line.front() == ':') {
      std::string chain = words[0].substr(1);
      if (chain != "INPUT" && chain != "FORWARD" && chain != "OUTPUT") {
        chains[chain] = out.acls.size();
        out.acls.push_back(Acl{chain, {}});
      }
      continue;
    }
    if (words.size() < 2 || words[0] != "-A") return error("expected -A");
    const std::string& chain = words[1];
    AclRule r;
    std::string target, in_iface;
    bool has_sport = false, has_dport = false, has_icmp = false;
    for (size_t i = 2; i < words.size(); ++i) {
      const std::string& w = words[i];
      auto next = [&]() -> std::string {
        return i + 1 < words.size() ? words[++i] : "";
      };
      if (w == "-p") {
        std::optional<int> p = ParseProtocolKeyword(next());
        if (!p) return error("unknown protocol");
        r.protocol = *p;
      } else if (w == "-s" || w == "-d") {
        absl::StatusOr<Cidr> c = Cidr::Parse(next());
        if (!c.ok()) return error(std::string(c.status().message()));
        (w == "-s" ? r.src : r.dst) = *c;
      } else if (w == "-i") {
        in_iface = next();
      } else if (w == "-m") {
        next();
      } else if (w == "--sport" || w == "--sports" || w == "--dport" ||
                 w == "--dports") {
        absl::StatusOr<IntervalSet> ports = ParseIptablesPorts(next());
        if (!ports.ok()) return error(std::string(ports.status().message()));
        if (w.rfind("--s", 0) == 0) {
          r.sport = *ports;
          has_sport = true;
        } else {
          r.dport = *ports;
          has_dport = true;
        }
      } else if (w == "--icmp-type") {
        int64_t type = 0;
        if (!absl::SimpleAtoi(next(), &type)) return error("bad icmp type");
        r.icmp_types = IntervalSet::Point(type);
        has_icmp = true;
      } else if (w == "--ctstate") {
        for (absl::string_view flag : absl::StrSplit(next(), ',')) {
          if (flag == "NEW") r.state |= kStateNew;
          if (flag == "ESTABLISHED") r.state |= kStateEstablished;
        }
      } else if (w == "-j") {
        target = next();
      } else if (w == "--log-prefix") {
        next();
      } else {
        return error(absl::StrCat("unsupported option '", w, "'"));
      }
    }
    if (chain == "FORWARD" || chain == "INPUT" || chain == "OUTPUT") {
      if (!chains.count(target)) return error("jump to unknown chain");
      InterfaceAssignment a{std::string(firewall), in_iface,
                            Direction::kInbound, target};
      if (chain != "FORWARD") {
        a.interface = std::string(kSelfInterface);
        a.direction = chain == "INPUT" ? Direction::kInbound : Direction::kOutbound;
      }
      out.assignments.push_back(std::move(a));
      continue;
    }
    auto acl = chains.find(chain);
    if (acl == chains.end()) return error(absl::StrCat("unknown chain ", chain));
    if (target == "LOG") {
      pending_log = true;
      continue;
    }
    if (target != "ACCEPT" && target != "DROP") return error("unknown target");
    r.action = target == "ACCEPT" ? AclAction::kPermit : AclAction::kDeny;
    if (r.protocol != kIpWildcard && HasPorts(r.protocol)) {
      if (!has_sport) r.sport = FullPorts();
      if (!has_dport) r.dport = FullPorts();
    }
    if (r.protocol == kProtoIcmp && !has_icmp) r.icmp_types = FullIcmp();
    r.log = pending_log;
    pending_log = false;
    if (!r.IsDenyAll()) r.comment = comment;
    out.acls[acl->second].rules.push_back(std::move(r));
  }
  return out;
}

}  // namespace forestfw
