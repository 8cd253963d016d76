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

// Unresolved syntax tree of one .policyml file. Internal to policy_lang.

#ifndef FORESTFW_SRC_POLICY_AST_H_
#define FORESTFW_SRC_POLICY_AST_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "forestfw/policy_lang.h"

namespace forestfw::ast {

struct SetTerm {
  std::string name;  // empty for numeric ranges
  std::optional<Interval> range;
  SourceLocation location;
};

// terms[0] ops[0] terms[1] ops[1] ... with ops in {kComma, kCaret,
// kBackslash}.
struct SetExpr {
  std::vector<SetTerm> terms;
  std::vector<TokenKind> ops;
};

struct NameRef {
  std::string name;
  SourceLocation location;
};

struct ServiceDecl {
  NameRef name;
  std::vector<Attr> attrs;
};

struct GroupDecl {
  NameRef name;
  SetExpr body;
};

struct RuleDecl {
  NameRef name;
  NameRef left;
  RuleOperator op = RuleOperator::kUnidirectional;
  NameRef right;
  SetExpr services;
};

struct RuleGroupDecl {
  NameRef name;
  std::vector<NameRef> members;
};

struct ReportingDecl {
  NameRef name;
  std::vector<Attr> attrs;
};

struct PolicyDecl {
  NameRef name;
  NameRef rule_group;
  NameRef reporting_rule;
};

struct File {
  std::string name;
  std::vector<NameRef> imports;
  std::optional<NameRef> model;
  std::vector<ServiceDecl> services;
  std::vector<GroupDecl> service_groups;
  std::vector<GroupDecl> port_groups;
  std::vector<GroupDecl> zone_groups;
  std::vector<RuleDecl> rules;
  std::vector<RuleGroupDecl> rule_groups;
  std::vector<ReportingDecl> reporting_rules;
  std::vector<PolicyDecl> policies;
};

absl::StatusOr<File> ParseFile(std::string_view text, std::string_view file);

// Parses a bare set expression (used by ResolveServiceExpr).
absl::StatusOr<SetExpr> ParseSetExpr(std::string_view text);

}  // namespace forestfw::ast

#endif  // FORESTFW_SRC_POLICY_AST_H_
