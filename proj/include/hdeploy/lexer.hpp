// Copyright 2026 The hdeploy Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//
// Lexical front end for the C subset accepted by the analyzer.
//
// tokenize() turns source text into raw tokens with 1-based positions.
// Comments and whole preprocessor lines produce no tokens. normalize() maps
// the raw stream onto parameterized token classes: every identifier becomes
// P, every literal becomes L, keywords and punctuation stay as themselves.
// Clone matching and pattern fingerprints both operate on that form.
//
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hdeploy/error.hpp"

namespace hdeploy {

enum class TokenKind {
  Keyword,
  Ident,
  IntLit,
  FloatLit,
  StringLit,
  CharLit,
  Punct,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::Punct;
  std::string text;
  std::uint32_t line = 1;
  std::uint32_t col = 1;

  bool operator==(const Token&) const = default;
};

class LexError : public Error {
 public:
  enum class Kind { UnterminatedString, UnterminatedComment };

  LexError(Kind kind, std::uint32_t line, std::uint32_t col);

  Kind kind() const noexcept { return kind_; }
  std::uint32_t line() const noexcept { return line_; }
  std::uint32_t col() const noexcept { return col_; }

 private:
  Kind kind_;
  std::uint32_t line_;
  std::uint32_t col_;
};

/// True for the 37 C99 keywords.
bool is_keyword(std::string_view word);

/// Splits C-subset source into tokens. Throws LexError on an unterminated
/// string/char literal or block comment.
std::vector<Token> tokenize(std::string_view source);

/// One parameterized token class.
class NormalizedToken {
 public:
  enum class Class : std::uint8_t { Lexeme, Param, Literal };

  static NormalizedToken param() { return NormalizedToken(Class::Param, {}); }
  static NormalizedToken literal() { return NormalizedToken(Class::Literal, {}); }
  static NormalizedToken lexeme(std::string text) {
    return NormalizedToken(Class::Lexeme, std::move(text));
  }

  Class token_class() const noexcept { return class_; }
  bool is_param() const noexcept { return class_ == Class::Param; }

  /// "P", "L", or the keyword/punctuation lexeme.
  std::string_view display() const noexcept;

  bool operator==(const NormalizedToken&) const = default;
  auto operator<=>(const NormalizedToken&) const = default;

 private:
  NormalizedToken(Class c, std::string text) : class_(c), lexeme_(std::move(text)) {}

  Class class_;
  std::string lexeme_;
};

struct NormalizedSequence {
  std::vector<NormalizedToken> tokens;
  std::vector<std::size_t> origin;   // index into the raw token list
  std::vector<std::uint32_t> lines;  // source line of the originating token

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }

  bool operator==(const NormalizedSequence&) const = default;
};

NormalizedSequence normalize(const std::vector<Token>& tokens);

/// Space-separated display form, e.g. "P = P + L ;".
std::string to_string(const NormalizedSequence& seq);

}  // namespace hdeploy
