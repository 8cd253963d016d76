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

// Executable semantics of policy rules over packet-header space.
//
// A HeaderPoint stands for every packet sequence sharing its header values;
// rules only accept or deny, so a decision is a function of the header
// class. Dimensions that do not apply to a protocol are pinned to a
// sentinel value: ports are 0 for protocols other than TCP/UDP and the
// ICMP type is 0 for protocols other than ICMP.

#ifndef FORESTFW_HEADER_SPACE_H_
#define FORESTFW_HEADER_SPACE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "forestfw/interval_set.h"

namespace forestfw {

inline constexpr int kProtoIcmp = 1;
inline constexpr int kProtoTcp = 6;
inline constexpr int kProtoUdp = 17;
inline constexpr int kProtoOspf = 89;

inline constexpr int64_t kMaxAddress = 0xFFFFFFFFLL;
inline constexpr int64_t kMaxProtocol = 255;
inline constexpr int64_t kMaxPort = 65535;
inline constexpr int64_t kMaxIcmpType = 255;
inline constexpr int64_t kSentinel = 0;

inline bool HasPorts(int protocol) {
  return protocol == kProtoTcp || protocol == kProtoUdp;
}

// IPv4 prefix. Stored canonical: host bits are zero.
struct Cidr {
  uint32_t network = 0;
  int prefix_len = 0;

  static absl::StatusOr<Cidr> Parse(std::string_view text);
  Interval Range() const;
  bool Contains(uint32_t address) const { return Range().Contains(address); }
  std::string ToString() const;
  friend auto operator<=>(const Cidr&, const Cidr&) = default;
};

std::string FormatAddress(uint32_t address);
absl::StatusOr<uint32_t> ParseAddress(std::string_view text);

struct HeaderPoint {
  uint32_t src_addr = 0;
  uint32_t dst_addr = 0;
  int protocol = 0;
  int sport = 0;
  int dport = 0;
  int icmp_type = 0;

  friend auto operator<=>(const HeaderPoint&, const HeaderPoint&) = default;
};

// A cross product of per-dimension sets. Each dimension is kept in
// IntervalSet normal form.
struct Predicate {
  IntervalSet src;
  IntervalSet dst;
  IntervalSet protocol;
  IntervalSet sport;
  IntervalSet dport;
  IntervalSet icmp;

  static Predicate Full();
  // Predicate over one protocol's header fields with the non-applicable
  // dimensions pinned to the sentinel. Addresses are full.
  static Predicate ForProtocol(int protocol, IntervalSet sport,
                               IntervalSet dport, IntervalSet icmp);

  bool IsEmpty() const;
  Predicate Intersect(const Predicate& other) const;
  // Lowest point of a non-empty predicate.
  HeaderPoint AnyPoint() const;
  std::string ToString() const;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

bool Matches(const Predicate& p, const HeaderPoint& x);

enum class Action { kAccept, kDeny };

std::string_view ActionName(Action action);

struct MatchRule {
  Action action = Action::kAccept;
  Predicate predicate;
  std::string origin;
};

// Decision of a rule list where no match is left undefined; these are the
// building blocks for the first-match and last-match combination
// operators, which are associative on partial decisions.
std::optional<Action> FirstMatchPartial(std::span<const MatchRule> rules,
                                        const HeaderPoint& x);
std::optional<Action> LastMatchPartial(std::span<const MatchRule> rules,
                                       const HeaderPoint& x);
inline std::optional<Action> CombineFirst(std::optional<Action> a,
                                          std::optional<Action> b) {
  return a.has_value() ? a : b;
}
inline std::optional<Action> CombineLast(std::optional<Action> a,
                                         std::optional<Action> b) {
  return b.has_value() ? b : a;
}

// Total decisions with the implicit deny-all at the end.
Action EvalFirstMatch(std::span<const MatchRule> rules, const HeaderPoint& x);
Action EvalLastMatch(std::span<const MatchRule> rules, const HeaderPoint& x);
// Accept iff any rule matches. Rejects rule lists that contain a deny rule.
absl::StatusOr<Action> EvalWhitelist(std::span<const MatchRule> rules,
                                     const HeaderPoint& x);

}  // namespace forestfw

#endif  // FORESTFW_HEADER_SPACE_H_
