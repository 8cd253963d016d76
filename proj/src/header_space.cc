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

#include "forestfw/header_space.h"

#include <charconv>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace forestfw {

absl::StatusOr<uint32_t> ParseAddress(std::string_view text) {
  std::vector<std::string> octets =
      absl::StrSplit(std::string(text), '.');
  if (octets.size() != 4) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid IPv4 address '", std::string(text), "'"));
  }
  uint32_t address = 0;
  for (const std::string& octet : octets) {
    int value = -1;
    auto [ptr, ec] =
        std::from_chars(octet.data(), octet.data() + octet.size(), value);
    if (octet.empty() || ec != std::errc() ||
        ptr != octet.data() + octet.size() || value < 0 || value > 255) {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid IPv4 address '", std::string(text), "'"));
    }
    address = (address << 8) | static_cast<uint32_t>(value);
  }
  return address;
}

std::string FormatAddress(uint32_t address) {
  return absl::StrCat(address >> 24, ".", (address >> 16) & 0xFF, ".",
                      (address >> 8) & 0xFF, ".", address & 0xFF);
}

absl::StatusOr<Cidr> Cidr::Parse(std::string_view text) {
  std::string_view addr_part = text;
  int prefix_len = 32;
  if (size_t slash = text.find('/'); slash != std::string_view::npos) {
    addr_part = text.substr(0, slash);
    if (!absl::SimpleAtoi(std::string(text.substr(slash + 1)), &prefix_len) ||
        prefix_len < 0 || prefix_len > 32) {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid prefix length in '", std::string(text), "'"));
    }
  }
  absl::StatusOr<uint32_t> address = ParseAddress(addr_part);
  if (!address.ok()) return address.status();
  uint32_t mask =
      prefix_len == 0 ? 0u : ~uint32_t{0} << (32 - prefix_len);
  if ((*address & ~mask) != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("host bits set in prefix '", std::string(text), "'"));
  }
  return Cidr{*address, prefix_len};
}

Interval Cidr::Range() const {
  int64_t size = int64_t{1} << (32 - prefix_len);
  return {network, static_cast<int64_t>(network) + size - 1};
}

std::string Cidr::ToString() const {
  return absl::StrCat(FormatAddress(network), "/", prefix_len);
}

Predicate Predicate::Full() {
  return {IntervalSet::Of(0, kMaxAddress), IntervalSet::Of(0, kMaxAddress),
          IntervalSet::Of(0, kMaxProtocol), IntervalSet::Of(0, kMaxPort),
          IntervalSet::Of(0, kMaxPort),     IntervalSet::Of(0, kMaxIcmpType)};
}

Predicate Predicate::ForProtocol(int protocol, IntervalSet sport,
                                 IntervalSet dport, IntervalSet icmp) {
  Predicate p = Full();
  p.protocol = IntervalSet::Point(protocol);
  if (HasPorts(protocol)) {
    p.sport = std::move(sport);
    p.dport = std::move(dport);
  } else {
    p.sport = IntervalSet::Point(kSentinel);
    p.dport = IntervalSet::Point(kSentinel);
  }
  p.icmp = protocol == kProtoIcmp ? std::move(icmp)
                                  : IntervalSet::Point(kSentinel);
  return p;
}

bool Predicate::IsEmpty() const {
  return src.empty() || dst.empty() || protocol.empty() || sport.empty() ||
         dport.empty() || icmp.empty();
}

Predicate Predicate::Intersect(const Predicate& other) const {
  return {src.Intersect(other.src),         dst.Intersect(other.dst),
          protocol.Intersect(other.protocol), sport.Intersect(other.sport),
          dport.Intersect(other.dport),     icmp.Intersect(other.icmp)};
}

HeaderPoint Predicate::AnyPoint() const {
  return {static_cast<uint32_t>(src.Min()),
          static_cast<uint32_t>(dst.Min()),
          static_cast<int>(protocol.Min()),
          static_cast<int>(sport.Min()),
          static_cast<int>(dport.Min()),
          static_cast<int>(icmp.Min())};
}

std::string Predicate::ToString() const {
  return absl::StrCat("{src=", src.ToString(), " dst=", dst.ToString(),
                      " protocol=", protocol.ToString(),
                      " sport=", sport.ToString(), " dport=", dport.ToString(),
                      " icmp=", icmp.ToString(), "}");
}

bool Matches(const Predicate& p, const HeaderPoint& x) {
  return p.src.Contains(x.src_addr) && p.dst.Contains(x.dst_addr) &&
         p.protocol.Contains(x.protocol) && p.sport.Contains(x.sport) &&
         p.dport.Contains(x.dport) && p.icmp.Contains(x.icmp_type);
}

std::string_view ActionName(Action action) {
  return action == Action::kAccept ? "accept" : "deny";
}

std::optional<Action> FirstMatchPartial(std::span<const MatchRule> rules,
                                        const HeaderPoint& x) {
  for (const MatchRule& rule : rules) {
    if (Matches(rule.predicate, x)) return rule.action;
  }
  return std::nullopt;
}

std::optional<Action> LastMatchPartial(std::span<const MatchRule> rules,
                                       const HeaderPoint& x) {
  for (auto it = rules.rbegin(); it != rules.rend(); ++it) {
    if (Matches(it->predicate, x)) return it->action;
  }
  return std::nullopt;
}

Action EvalFirstMatch(std::span<const MatchRule> rules, const HeaderPoint& x) {
  return FirstMatchPartial(rules, x).value_or(Action::kDeny);
}

Action EvalLastMatch(std::span<const MatchRule> rules, const HeaderPoint& x) {
  return LastMatchPartial(rules, x).value_or(Action::kDeny);
}

absl::StatusOr<Action> EvalWhitelist(std::span<const MatchRule> rules,
                                     const HeaderPoint& x) {
  bool accepted = false;
  for (const MatchRule& rule : rules) {
    if (rule.action != Action::kAccept) {
      return absl::FailedPreconditionError(absl::StrCat(
          "whitelist evaluation given a deny rule (", rule.origin, ")"));
    }
    accepted = accepted || Matches(rule.predicate, x);
  }
  return accepted ? Action::kAccept : Action::kDeny;
}

}  // namespace forestfw
