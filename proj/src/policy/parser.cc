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

// Recursive-descent parser for the policy grammar:
//
//   file          := (import | load | decl)*
//   import        := "import" dotted_name ";"
//   load          := "load_zone_conduit_model" STRING [";"]
//   service       := "service" NAME "{" (attr ";")* "}"
//   attr          := dotted_key "=" value
//   service_group := "service_group" NAME "{" setexpr "}"
//   port_group    := "port_group" NAME "{" setexpr "}"
//   zone_group    := "zone_group" NAME "{" setexpr "}"
//   policy_rule   := "policy_rule" NAME "{" NAME ("->"|"<->") NAME ":"
//                    setexpr "}"
//   rule_group    := "rule_group" NAME "{" [NAME ("," NAME)*] "}"
//   reporting_rule:= "reporting_rule" NAME "{" (attr ";")* "}"
//   policy        := "policy" NAME "{" NAME ";" NAME [";"] "}"
//   setexpr       := term (("," | "^" | "\") term)*
//   term          := dotted_name | INT | INT "-" INT
//
// The final ";" before a closing brace is optional throughout.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "src/policy/ast.h"

namespace forestfw::ast {
namespace {

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string_view file)
      : tokens_(std::move(tokens)), file_(file) {}

  absl::StatusOr<File> ParseFile() {
    File out;
    out.name = std::string(file_);
    while (!At(TokenKind::kEnd)) {
      const Token& tok = Peek();
      if (tok.kind != TokenKind::kKeyword) {
        return Expected("a declaration keyword");
      }
      absl::Status status = absl::OkStatus();
      if (tok.text == "import") {
        status = ParseImport(out);
      } else if (tok.text == "load_zone_conduit_model") {
        status = ParseLoad(out);
      } else if (tok.text == "service") {
        status = ParseService(out);
      } else if (tok.text == "service_group") {
        status = ParseGroup(out.service_groups);
      } else if (tok.text == "port_group") {
        status = ParseGroup(out.port_groups);
      } else if (tok.text == "zone_group") {
        status = ParseGroup(out.zone_groups);
      } else if (tok.text == "policy_rule") {
        status = ParseRule(out);
      } else if (tok.text == "rule_group") {
        status = ParseRuleGroup(out);
      } else if (tok.text == "reporting_rule") {
        status = ParseReporting(out);
      } else if (tok.text == "policy") {
        status = ParsePolicyDecl(out);
      } else {
        return Expected("a declaration keyword");
      }
      if (!status.ok()) return status;
    }
    return out;
  }

  absl::StatusOr<SetExpr> ParseStandaloneSetExpr() {
    absl::StatusOr<SetExpr> expr = ParseSetExprBody();
    if (!expr.ok()) return expr;
    if (!At(TokenKind::kEnd)) return Expected("end of expression");
    return expr;
  }

 private:
  const Token& Peek(size_t ahead = 0) const {
    size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  bool At(TokenKind kind) const { return Peek().kind == kind; }
  const Token& Take() {
    const Token& tok = Peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return tok;
  }
  SourceLocation Loc(const Token& tok) const {
    return {std::string(file_), tok.line, tok.column};
  }

  absl::Status Expected(std::string_view what) const {
    const Token& tok = Peek();
    std::string found = tok.kind == TokenKind::kEnd
                            ? "end of input"
                            : absl::StrCat(std::string(TokenKindName(tok.kind)), " '",
                                           tok.text, "'");
    if (tok.kind == TokenKind::kEnd) found = "end of input";
    return absl::InvalidArgumentError(
        absl::StrCat(file_, ":", tok.line, ":", tok.column,
                     ": error: expected ", std::string(what), ", found ", found));
  }

  absl::Status Expect(TokenKind kind) {
    if (!At(kind)) return Expected(TokenKindName(kind));
    Take();
    return absl::OkStatus();
  }

  // Identifier (keywords allowed only after a dot, e.g.
  // `granularity.policy`).
  absl::StatusOr<NameRef> ParseDottedName() {
    if (!At(TokenKind::kIdent)) return Expected("a name");
    const Token& first = Take();
    NameRef ref{first.text, Loc(first)};
    while (At(TokenKind::kDot)) {
      Take();
      if (!At(TokenKind::kIdent) && !At(TokenKind::kKeyword)) {
        return Expected("a name after '.'");
      }
      absl::StrAppend(&ref.name, ".", Take().text);
    }
    return ref;
  }

  absl::StatusOr<NameRef> ParseName() {
    if (!At(TokenKind::kIdent)) return Expected("a name");
    const Token& tok = Take();
    return NameRef{tok.text, Loc(tok)};
  }

  absl::StatusOr<int64_t> ParseInt() {
    if (!At(TokenKind::kInt)) return Expected("an integer");
    int64_t value = 0;
    const Token& tok = Take();
    if (!absl::SimpleAtoi(tok.text, &value)) {
      return absl::InvalidArgumentError(absl::StrCat(
          file_, ":", tok.line, ":", tok.column, ": error: bad integer"));
    }
    return value;
  }

  absl::Status ParseImport(File& out) {
    Take();
    absl::StatusOr<NameRef> name = ParseDottedName();
    if (!name.ok()) return name.status();
    out.imports.push_back(*std::move(name));
    return Expect(TokenKind::kSemicolon);
  }

  absl::Status ParseLoad(File& out) {
    const Token& kw = Take();
    if (!At(TokenKind::kString)) return Expected("a quoted file name");
    const Token& path = Take();
    if (out.model.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat(file_, ":", kw.line, ":", kw.column,
                       ": error: zone-conduit model loaded twice"));
    }
    out.model = NameRef{path.text, Loc(path)};
    if (At(TokenKind::kSemicolon)) Take();
    return absl::OkStatus();
  }

  absl::StatusOr<AttrScalar> ParseScalar() {
    AttrScalar scalar;
    if (At(TokenKind::kInt)) {
      absl::StatusOr<int64_t> lo = ParseInt();
      if (!lo.ok()) return lo.status();
      scalar.kind = AttrScalar::Kind::kInt;
      scalar.lo = scalar.hi = *lo;
      if (At(TokenKind::kMinus)) {
        const Token& dash = Take();
        absl::StatusOr<int64_t> hi = ParseInt();
        if (!hi.ok()) return hi.status();
        if (*hi < *lo) {
          return absl::InvalidArgumentError(
              absl::StrCat(file_, ":", dash.line, ":", dash.column,
                           ": error: inverted range ", *lo, "-", *hi));
        }
        scalar.kind = AttrScalar::Kind::kRange;
        scalar.hi = *hi;
      }
      return scalar;
    }
    if (At(TokenKind::kString)) {
      scalar.kind = AttrScalar::Kind::kString;
      scalar.text = Take().text;
      return scalar;
    }
    if (At(TokenKind::kLBrace)) {
      absl::StatusOr<AttrValue> nested = ParseBraced();
      if (!nested.ok()) return nested.status();
      scalar.kind = AttrScalar::Kind::kNested;
      scalar.nested = std::make_shared<AttrValue>(*std::move(nested));
      return scalar;
    }
    absl::StatusOr<NameRef> name = ParseDottedName();
    if (!name.ok()) return Expected("a value");
    scalar.kind = AttrScalar::Kind::kName;
    scalar.text = name->name;
    return scalar;
  }

  bool AtAttrStart() const {
    if (!At(TokenKind::kIdent) && !At(TokenKind::kKeyword)) return false;
    size_t i = 1;
    while (Peek(i).kind == TokenKind::kDot) i += 2;
    return Peek(i).kind == TokenKind::kEquals;
  }

  // "{" attr* "}" or "{" list "}".
  absl::StatusOr<AttrValue> ParseBraced() {
    if (absl::Status s = Expect(TokenKind::kLBrace); !s.ok()) return s;
    AttrValue value;
    if (AtAttrStart()) {
      value.is_block = true;
      absl::StatusOr<std::vector<Attr>> attrs = ParseAttrList();
      if (!attrs.ok()) return attrs.status();
      value.attrs = *std::move(attrs);
    } else if (!At(TokenKind::kRBrace)) {
      absl::StatusOr<AttrValue> list = ParseList();
      if (!list.ok()) return list.status();
      value.items = std::move(list->items);
    }
    if (absl::Status s = Expect(TokenKind::kRBrace); !s.ok()) return s;
    return value;
  }

  absl::StatusOr<AttrValue> ParseList() {
    AttrValue value;
    while (true) {
      absl::StatusOr<AttrScalar> scalar = ParseScalar();
      if (!scalar.ok()) return scalar.status();
      value.items.push_back(*std::move(scalar));
      if (!At(TokenKind::kComma)) break;
      Take();
    }
    return value;
  }

  absl::StatusOr<AttrValue> ParseAttrValue() {
    if (At(TokenKind::kLBrace)) {
      absl::StatusOr<AttrValue> braced = ParseBraced();
      if (!braced.ok()) return braced;
      if (braced->is_block || !At(TokenKind::kComma)) return braced;
      // `{a}, b` continues as a list.
      Take();
      absl::StatusOr<AttrValue> rest = ParseList();
      if (!rest.ok()) return rest;
      braced->items.insert(braced->items.end(), rest->items.begin(),
                           rest->items.end());
      return braced;
    }
    return ParseList();
  }

  // attr (";" attr)* [";"], stopping before "}".
  absl::StatusOr<std::vector<Attr>> ParseAttrList() {
    std::vector<Attr> attrs;
    while (!At(TokenKind::kRBrace)) {
      if (!At(TokenKind::kIdent) && !At(TokenKind::kKeyword)) {
        return Expected("an attribute name or '}'");
      }
      const Token& first = Peek();
      Attr attr;
      attr.location = Loc(first);
      attr.key = Take().text;
      while (At(TokenKind::kDot)) {
        Take();
        if (!At(TokenKind::kIdent) && !At(TokenKind::kKeyword)) {
          return Expected("an attribute name after '.'");
        }
        absl::StrAppend(&attr.key, ".", Take().text);
      }
      if (absl::Status s = Expect(TokenKind::kEquals); !s.ok()) return s;
      absl::StatusOr<AttrValue> value = ParseAttrValue();
      if (!value.ok()) return value.status();
      attr.value = std::make_shared<AttrValue>(*std::move(value));
      attrs.push_back(std::move(attr));
      if (At(TokenKind::kSemicolon)) {
        Take();
      } else if (!At(TokenKind::kRBrace)) {
        return Expected("';' or '}'");
      }
    }
    return attrs;
  }

  absl::Status ParseService(File& out) {
    Take();
    absl::StatusOr<NameRef> name = ParseName();
    if (!name.ok()) return name.status();
    if (absl::Status s = Expect(TokenKind::kLBrace); !s.ok()) return s;
    absl::StatusOr<std::vector<Attr>> attrs = ParseAttrList();
    if (!attrs.ok()) return attrs.status();
    if (absl::Status s = Expect(TokenKind::kRBrace); !s.ok()) return s;
    out.services.push_back({*std::move(name), *std::move(attrs)});
    return absl::OkStatus();
  }

  absl::StatusOr<SetTerm> ParseTerm() {
    SetTerm term;
    term.location = Loc(Peek());
    if (At(TokenKind::kInt)) {
      absl::StatusOr<int64_t> lo = ParseInt();
      if (!lo.ok()) return lo.status();
      int64_t hi = *lo;
      if (At(TokenKind::kMinus)) {
        Take();
        absl::StatusOr<int64_t> parsed_hi = ParseInt();
        if (!parsed_hi.ok()) return parsed_hi.status();
        hi = *parsed_hi;
        if (hi < *lo) {
          return absl::InvalidArgumentError(absl::StrCat(
              file_, ":", term.location.line, ":", term.location.column,
              ": error: inverted range ", *lo, "-", hi));
        }
      }
      term.range = Interval{*lo, hi};
      return term;
    }
    if (!At(TokenKind::kIdent)) return Expected("a name or number");
    absl::StatusOr<NameRef> name = ParseDottedName();
    if (!name.ok()) return name.status();
    term.name = name->name;
    return term;
  }

  absl::StatusOr<SetExpr> ParseSetExprBody() {
    SetExpr expr;
    absl::StatusOr<SetTerm> first = ParseTerm();
    if (!first.ok()) return first.status();
    expr.terms.push_back(*std::move(first));
    while (At(TokenKind::kComma) || At(TokenKind::kCaret) ||
           At(TokenKind::kBackslash)) {
      expr.ops.push_back(Take().kind);
      absl::StatusOr<SetTerm> term = ParseTerm();
      if (!term.ok()) return term.status();
      expr.terms.push_back(*std::move(term));
    }
    return expr;
  }

  absl::Status ParseGroup(std::vector<GroupDecl>& out) {
    Take();
    absl::StatusOr<NameRef> name = ParseName();
    if (!name.ok()) return name.status();
    if (absl::Status s = Expect(TokenKind::kLBrace); !s.ok()) return s;
    GroupDecl decl{*std::move(name), {}};
    if (!At(TokenKind::kRBrace)) {
      absl::StatusOr<SetExpr> body = ParseSetExprBody();
      if (!body.ok()) return body.status();
      decl.body = *std::move(body);
    }
    if (absl::Status s = Expect(TokenKind::kRBrace); !s.ok()) return s;
    out.push_back(std::move(decl));
    return absl::OkStatus();
  }

  absl::Status ParseRule(File& out) {
    Take();
    RuleDecl rule;
    absl::StatusOr<NameRef> name = ParseName();
    if (!name.ok()) return name.status();
    rule.name = *std::move(name);
    if (absl::Status s = Expect(TokenKind::kLBrace); !s.ok()) return s;
    absl::StatusOr<NameRef> left = ParseDottedName();
    if (!left.ok()) return left.status();
    rule.left = *std::move(left);
    if (At(TokenKind::kArrow)) {
      rule.op = RuleOperator::kUnidirectional;
    } else if (At(TokenKind::kBiArrow)) {
      rule.op = RuleOperator::kBidirectional;
    } else {
      return Expected("'->' or '<->'");
    }
    Take();
    absl::StatusOr<NameRef> right = ParseDottedName();
    if (!right.ok()) return right.status();
    rule.right = *std::move(right);
    if (absl::Status s = Expect(TokenKind::kColon); !s.ok()) return s;
    absl::StatusOr<SetExpr> services = ParseSetExprBody();
    if (!services.ok()) return services.status();
    rule.services = *std::move(services);
    if (absl::Status s = Expect(TokenKind::kRBrace); !s.ok()) return s;
    out.rules.push_back(std::move(rule));
    return absl::OkStatus();
  }

  absl::Status ParseRuleGroup(File& out) {
    Take();
    RuleGroupDecl group;
    absl::StatusOr<NameRef> name = ParseName();
    if (!name.ok()) return name.status();
    group.name = *std::move(name);
    if (absl::Status s = Expect(TokenKind::kLBrace); !s.ok()) return s;
    while (!At(TokenKind::kRBrace)) {
      absl::StatusOr<NameRef> member = ParseDottedName();
      if (!member.ok()) return member.status();
      group.members.push_back(*std::move(member));
      if (!At(TokenKind::kComma)) break;
      Take();
    }
    if (absl::Status s = Expect(TokenKind::kRBrace); !s.ok()) return s;
    out.rule_groups.push_back(std::move(group));
    return absl::OkStatus();
  }

  absl::Status ParseReporting(File& out) {
    Take();
    absl::StatusOr<NameRef> name = ParseName();
    if (!name.ok()) return name.status();
    if (absl::Status s = Expect(TokenKind::kLBrace); !s.ok()) return s;
    absl::StatusOr<std::vector<Attr>> attrs = ParseAttrList();
    if (!attrs.ok()) return attrs.status();
    if (absl::Status s = Expect(TokenKind::kRBrace); !s.ok()) return s;
    out.reporting_rules.push_back({*std::move(name), *std::move(attrs)});
    return absl::OkStatus();
  }

  absl::Status ParsePolicyDecl(File& out) {
    Take();
    PolicyDecl decl;
    absl::StatusOr<NameRef> name = ParseName();
    if (!name.ok()) return name.status();
    decl.name = *std::move(name);
    if (absl::Status s = Expect(TokenKind::kLBrace); !s.ok()) return s;
    absl::StatusOr<NameRef> rules = ParseDottedName();
    if (!rules.ok()) return rules.status();
    decl.rule_group = *std::move(rules);
    if (absl::Status s = Expect(TokenKind::kSemicolon); !s.ok()) return s;
    absl::StatusOr<NameRef> reporting = ParseDottedName();
    if (!reporting.ok()) return reporting.status();
    decl.reporting_rule = *std::move(reporting);
    if (At(TokenKind::kSemicolon)) Take();
    if (absl::Status s = Expect(TokenKind::kRBrace); !s.ok()) return s;
    out.policies.push_back(std::move(decl));
    return absl::OkStatus();
  }

  std::vector<Token> tokens_;
  std::string file_;
  size_t pos_ = 0;
};

}  // namespace

absl::StatusOr<File> ParseFile(std::string_view text, std::string_view file) {
  absl::StatusOr<std::vector<Token>> tokens = Tokenize(text, file);
  if (!tokens.ok()) return tokens.status();
  return Parser(*std::move(tokens), file).ParseFile();
}

absl::StatusOr<SetExpr> ParseSetExpr(std::string_view text) {
  absl::StatusOr<std::vector<Token>> tokens = Tokenize(text, "<expr>");
  if (!tokens.ok()) return tokens.status();
  return Parser(*std::move(tokens), "<expr>").ParseStandaloneSetExpr();
}

}  // namespace forestfw::ast
