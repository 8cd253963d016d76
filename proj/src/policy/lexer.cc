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

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "forestfw/policy_lang.h"

namespace forestfw {
namespace {

constexpr std::array<std::string_view, 10> kKeywords = {
    "import",       "load_zone_conduit_model", "service",
    "service_group", "port_group",             "zone_group",
    "policy_rule",  "rule_group",              "reporting_rule",
    "policy"};

constexpr std::string_view kOpenCurly = "\xE2\x80\x9C";   // U+201C
constexpr std::string_view kCloseCurly = "\xE2\x80\x9D";  // U+201D

bool IsIdentStart(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool IsIdentChar(char c) { return IsIdentStart(c) || (c >= '0' && c <= '9'); }
bool IsDigit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  Lexer(std::string_view text, std::string_view file)
      : text_(text), file_(file) {}

  absl::StatusOr<std::vector<Token>> Run() {
    std::vector<Token> tokens;
    while (true) {
      SkipSpaceAndComments();
      if (pos_ >= text_.size()) break;
      absl::StatusOr<Token> token = Next();
      if (!token.ok()) return token.status();
      tokens.push_back(*std::move(token));
    }
    tokens.push_back({TokenKind::kEnd, "", line_, column_});
    return tokens;
  }

 private:
  bool StartsWith(std::string_view s) const {
    return text_.substr(pos_).starts_with(s);
  }

  void Advance(size_t n = 1) {
    for (size_t i = 0; i < n && pos_ < text_.size(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
        ++column_;
      }
      ++pos_;
    }
  }

  void SkipSpaceAndComments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        Advance();
      } else if (StartsWith("//")) {
        while (pos_ < text_.size() && text_[pos_] != '\n') Advance();
      } else {
        break;
      }
    }
  }

  absl::Status Error(int line, int column, const std::string& message) const {
    return absl::InvalidArgumentError(
        absl::StrCat(file_, ":", line, ":", column, ": error: ", message));
  }

  absl::StatusOr<Token> ReadString(int line, int column,
                                   std::string_view open,
                                   std::string_view close) {
    Advance(open.size());
    std::string contents;
    while (pos_ < text_.size() && !StartsWith(close)) {
      if (text_[pos_] == '\n') break;
      contents.push_back(text_[pos_]);
      Advance();
    }
    if (!StartsWith(close)) {
      return Error(line, column, "unterminated string literal");
    }
    Advance(close.size());
    return Token{TokenKind::kString, std::move(contents), line, column};
  }

  absl::StatusOr<Token> Next() {
    int line = line_;
    int column = column_;
    char c = text_[pos_];
    auto single = [&](TokenKind kind) {
      Advance();
      return Token{kind, std::string(1, c), line, column};
    };
    if (IsIdentStart(c)) {
      size_t start = pos_;
      while (pos_ < text_.size() && IsIdentChar(text_[pos_])) Advance();
      std::string word(text_.substr(start, pos_ - start));
      TokenKind kind = TokenKind::kIdent;
      for (std::string_view kw : kKeywords) {
        if (word == kw) kind = TokenKind::kKeyword;
      }
      return Token{kind, std::move(word), line, column};
    }
    if (IsDigit(c)) {
      size_t start = pos_;
      while (pos_ < text_.size() && IsDigit(text_[pos_])) Advance();
      if (pos_ - start > 9) {
        return Error(line, column, "integer literal too large");
      }
      return Token{TokenKind::kInt,
                   std::string(text_.substr(start, pos_ - start)), line,
                   column};
    }
    if (c == '"') return ReadString(line, column, "\"", "\"");
    if (StartsWith("``")) return ReadString(line, column, "``", "''");
    if (StartsWith(kOpenCurly)) {
      return ReadString(line, column, kOpenCurly, kCloseCurly);
    }
    if (StartsWith("<->")) {
      Advance(3);
      return Token{TokenKind::kBiArrow, "<->", line, column};
    }
    if (StartsWith("->")) {
      Advance(2);
      return Token{TokenKind::kArrow, "->", line, column};
    }
    switch (c) {
      case '{':
        return single(TokenKind::kLBrace);
      case '}':
        return single(TokenKind::kRBrace);
      case ';':
        return single(TokenKind::kSemicolon);
      case ',':
        return single(TokenKind::kComma);
      case '.':
        return single(TokenKind::kDot);
      case '=':
        return single(TokenKind::kEquals);
      case ':':
        return single(TokenKind::kColon);
      case '^':
        return single(TokenKind::kCaret);
      case '\\':
        return single(TokenKind::kBackslash);
      case '-':
        return single(TokenKind::kMinus);
      default:
        break;
    }
    std::string shown = (static_cast<unsigned char>(c) < 0x20 ||
                         static_cast<unsigned char>(c) >= 0x7F)
                            ? absl::StrCat("byte 0x",
                                           absl::Hex(static_cast<unsigned char>(c)))
                            : absl::StrCat("'", std::string(1, c), "'");
    return Error(line, column, absl::StrCat("unexpected character ", shown));
  }

  std::string_view text_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

std::string_view TokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::kKeyword:
      return "keyword";
    case TokenKind::kIdent:
      return "identifier";
    case TokenKind::kInt:
      return "integer";
    case TokenKind::kString:
      return "string";
    case TokenKind::kLBrace:
      return "'{'";
    case TokenKind::kRBrace:
      return "'}'";
    case TokenKind::kSemicolon:
      return "';'";
    case TokenKind::kComma:
      return "','";
    case TokenKind::kDot:
      return "'.'";
    case TokenKind::kEquals:
      return "'='";
    case TokenKind::kArrow:
      return "'->'";
    case TokenKind::kBiArrow:
      return "'<->'";
    case TokenKind::kColon:
      return "':'";
    case TokenKind::kCaret:
      return "'^'";
    case TokenKind::kBackslash:
      return "'\\'";
    case TokenKind::kMinus:
      return "'-'";
    case TokenKind::kEnd:
      return "end of input";
  }
  return "?";
}

absl::StatusOr<std::vector<Token>> Tokenize(std::string_view text,
                                            std::string_view file) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  return Lexer(text, file).Run();
}

}  // namespace forestfw
