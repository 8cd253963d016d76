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

// The high-level policy language (.policyml): tokens, the resolved
// intermediate-level policy, and the operations that produce and expand it.
//
// Parsing is two-pass. Declarations may reference names declared later in
// the same file; imported libraries bind under the last segment of their
// dotted name (`import system.services.iana_services;` exposes
// `iana_services.http`). An unqualified name resolves to a local
// declaration first and otherwise to the unique imported declaration of
// that name.

#ifndef FORESTFW_POLICY_LANG_H_
#define FORESTFW_POLICY_LANG_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "forestfw/diagnostics.h"
#include "forestfw/header_space.h"
#include "forestfw/interval_set.h"

namespace forestfw {

// ---------------------------------------------------------------------------
// Tokens

enum class TokenKind {
  kKeyword,
  kIdent,
  kInt,
  kString,
  kLBrace,
  kRBrace,
  kSemicolon,
  kComma,
  kDot,
  kEquals,
  kArrow,    // ->
  kBiArrow,  // <->
  kColon,
  kCaret,
  kBackslash,
  kMinus,
  kEnd,
};

std::string_view TokenKindName(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::kEnd;
  // Keyword/identifier spelling, integer digits, or the normalized string
  // contents (quotes removed).
  std::string text;
  int line = 0;
  int column = 0;
};

// Splits policy source into tokens; `//` comments are dropped. Strings may
// be delimited by "...", ``...'' or the typographic pair U+201C/U+201D.
absl::StatusOr<std::vector<Token>> Tokenize(std::string_view text,
                                            std::string_view file = "<input>");

// ---------------------------------------------------------------------------
// Resolved policy

// Protocol value used for `protocol=ip`: every IP protocol.
inline constexpr int kAnyProtocol = 256;

std::string ProtocolName(int protocol);

// The (protocol, attributes, values) tuple of a service. Port and type
// sets are stored as given; range checks are reported by ValidateSpec.
struct Service {
  std::string name;
  int protocol = 0;
  IntervalSet source_ports;  // non-empty only for TCP/UDP
  IntervalSet dest_ports;    // non-empty only for TCP/UDP
  IntervalSet icmp_types;    // non-empty only for ICMP
  std::string comment;

  // Equality of the header-space region, ignoring name and comment.
  bool SameValue(const Service& other) const;
  // Header region with full address dimensions.
  Predicate ToPredicate() const;
  std::string Describe() const;

  friend bool operator==(const Service&, const Service&) = default;
};

// Services deduplicated by value; member order is first insertion.
class ServiceSet {
 public:
  ServiceSet() = default;

  void Insert(const Service& service);
  bool ContainsValue(const Service& service) const;

  ServiceSet Union(const ServiceSet& other) const;
  ServiceSet Intersect(const ServiceSet& other) const;
  ServiceSet Difference(const ServiceSet& other) const;

  bool empty() const { return members_.empty(); }
  size_t size() const { return members_.size(); }
  const std::vector<Service>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  friend bool operator==(const ServiceSet&, const ServiceSet&) = default;

 private:
  std::vector<Service> members_;
};

struct ZoneGroup {
  std::string name;
  std::vector<std::string> zones;  // resolved zone identifiers, no groups

  friend bool operator==(const ZoneGroup&, const ZoneGroup&) = default;
};

enum class RuleOperator { kUnidirectional, kBidirectional };

struct HighLevelRule {
  std::string name;
  std::string left;  // zone or zone-group reference as written
  RuleOperator op = RuleOperator::kUnidirectional;
  std::string right;
  std::vector<std::string> left_zones;
  std::vector<std::string> right_zones;
  ServiceSet services;

  friend bool operator==(const HighLevelRule&, const HighLevelRule&) = default;
};

// Value of a `key=value` attribute: either a comma list of scalars or a
// braced block of nested attributes.
struct AttrValue;

struct AttrScalar {
  enum class Kind { kInt, kRange, kName, kString, kNested };
  Kind kind = Kind::kName;
  int64_t lo = 0;
  int64_t hi = 0;
  std::string text;
  std::shared_ptr<AttrValue> nested;

  friend bool operator==(const AttrScalar& a, const AttrScalar& b);
};

struct Attr {
  std::string key;
  std::shared_ptr<AttrValue> value;
  SourceLocation location;

  friend bool operator==(const Attr& a, const Attr& b);
};

struct AttrValue {
  std::vector<AttrScalar> items;
  std::vector<Attr> attrs;
  bool is_block = false;

  // Every name reachable below this value (scalars, nested lists).
  std::vector<std::string> Names() const;
  friend bool operator==(const AttrValue&, const AttrValue&) = default;
};

struct ReportingRule {
  std::string name;
  std::string use_case;
  // Dimension (network, policy, traffic, temporal, performance) to value.
  std::map<std::string, AttrValue> granularity;

  // Zone groups / rule groups named under `zone_or_group` / `rule_or_group`.
  std::vector<std::string> ReferencedZoneGroups() const;
  std::vector<std::string> ReferencedRuleGroups() const;

  friend bool operator==(const ReportingRule&, const ReportingRule&) = default;
};

struct GlobalPolicy {
  std::string name;
  std::string rule_group;
  std::string reporting_rule;

  friend bool operator==(const GlobalPolicy&, const GlobalPolicy&) = default;
};

struct PolicySpec {
  std::string file;
  std::vector<std::string> imports;
  std::optional<std::string> declared_model;

  std::map<std::string, Service> services;
  std::map<std::string, ServiceSet> service_groups;
  std::map<std::string, IntervalSet> port_groups;
  std::map<std::string, ZoneGroup> zone_groups;
  std::map<std::string, HighLevelRule> rules;
  std::map<std::string, std::vector<std::string>> rule_groups;
  std::map<std::string, ReportingRule> reporting_rules;
  std::optional<GlobalPolicy> global_policy;

  // Declaration site of every local (non-imported) name.
  std::map<std::string, SourceLocation> locations;

  SourceLocation LocationOf(std::string_view name) const;
  // Bare zone identifiers referenced by local zone groups and rules.
  std::set<std::string> ReferencedZones() const;

  // Structural equality, ignoring source locations and file name.
  bool SameAs(const PolicySpec& other) const;
};

// Resolves a dotted library name to policy-language source.
using Importer =
    std::function<absl::StatusOr<std::string>(std::string_view dotted_name)>;

absl::StatusOr<PolicySpec> ParsePolicy(std::string_view text,
                                       const Importer& importer,
                                       std::string_view file = "<input>");

// Evaluates a set expression over service and service-group names against
// an already-resolved policy. `\` and `^` bind tighter than `,`; operators
// of equal precedence apply left to right.
absl::StatusOr<ServiceSet> ResolveServiceExpr(std::string_view expr,
                                              const PolicySpec& env);

// Semantic checks; an empty result means valid.
std::vector<Diagnostic> ValidateSpec(const PolicySpec& spec);

// An inter-zone permit produced by expanding one high-level rule.
struct FlowRule {
  std::string rule_name;
  std::string src_zone;
  std::string dst_zone;
  Service service;

  friend bool operator==(const FlowRule&, const FlowRule&) = default;
};

// Expands the rules of the global policy's rule group: zone groups by
// cross product, `<->` into both directions, service groups into one flow
// per member service.
absl::StatusOr<std::vector<FlowRule>> ExpandRules(const PolicySpec& spec);

// Expands one named rule group (used for best-practice documents).
absl::StatusOr<std::vector<FlowRule>> ExpandRuleGroup(
    const PolicySpec& spec, std::string_view rule_group);

// Renders the local declarations back to source that parses to an equal
// PolicySpec under the same importer.
std::string PrettyPrint(const PolicySpec& spec);

// Importer over the built-in libraries only.
Importer BuiltinImporter();
// Importer that looks for `<dir>/<a>/<b>/<c>.policyml` under each search
// directory before falling back to the built-in libraries.
Importer MakeImporter(std::vector<std::string> search_dirs);
std::optional<std::string_view> BuiltinLibrarySource(std::string_view name);

}  // namespace forestfw

#endif  // FORESTFW_POLICY_LANG_H_
