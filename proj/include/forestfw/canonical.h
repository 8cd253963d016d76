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

// Canonical form of a whitelist over (protocol, icmp type, sport, dport).
//
// Each (protocol, icmp type) slice is cut into strips along the destination
// port axis; a strip holds the source-port set accepted for every dport in
// its interval. Adjacent strips with the same source-port set are merged,
// so two whitelists accept the same headers exactly when their canonical
// forms are equal.

#ifndef FORESTFW_CANONICAL_H_
#define FORESTFW_CANONICAL_H_

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "forestfw/header_space.h"
#include "forestfw/interval_set.h"
#include "forestfw/policy_lang.h"

namespace forestfw {

struct Strip {
  Interval dport;
  IntervalSet sport;

  friend bool operator==(const Strip&, const Strip&) = default;
};

struct CanonicalSlice {
  int protocol = 0;
  std::optional<int> icmp_type;  // set only for ICMP
  std::vector<Strip> strips;

  friend bool operator==(const CanonicalSlice&, const CanonicalSlice&) =
      default;
};

struct CanonicalPolicy {
  std::vector<CanonicalSlice> slices;

  bool empty() const { return slices.empty(); }
  bool Accepts(int protocol, int icmp_type, int sport, int dport) const;
  // "tcp dport 80 sport 0-65535; icmp type 8"
  std::string ToString() const;

  friend bool operator==(const CanonicalPolicy&, const CanonicalPolicy&) =
      default;
};

CanonicalPolicy Canonicalize(std::span<const Service> services);
// Rule form; addresses are ignored and deny rules are rejected.
absl::StatusOr<CanonicalPolicy> CanonicalizeRules(
    std::span<const MatchRule> rules);

bool Equivalent(std::span<const Service> p, std::span<const Service> q);
// True when every header accepted by p is accepted by q.
bool Includes(std::span<const Service> p, std::span<const Service> q);
bool Includes(const CanonicalPolicy& p, const CanonicalPolicy& q);
// Headers accepted by p but not by q.
CanonicalPolicy Difference(const CanonicalPolicy& p, const CanonicalPolicy& q);

// A best-practice document: the zones it protects and the upper bound on
// flows touching them.
struct BestPractice {
  std::string file;
  std::vector<std::string> protected_zones;
  std::vector<FlowRule> upper_bound;
};

// Reads the `protected_zones` zone group and the `best_practice` rule group.
absl::StatusOr<BestPractice> LoadBestPractice(const PolicySpec& spec);

struct BestPracticeViolation {
  std::string src_zone;
  std::string dst_zone;
  std::string protected_zone;
  CanonicalPolicy excess;
  std::vector<std::string> rules;  // high-level rules contributing the excess

  std::string Message() const;
};

// Checks every ordered zone pair with a protected endpoint. Fails when the
// document names a zone outside `known_zones`.
absl::StatusOr<std::vector<BestPracticeViolation>> CheckBestPractice(
    std::span<const FlowRule> policy, const std::set<std::string>& known_zones,
    const BestPractice& bp);

}  // namespace forestfw

#endif  // FORESTFW_CANONICAL_H_
