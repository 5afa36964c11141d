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

#include "hdeploy/lexer.hpp"

#include <algorithm>
#include <array>

namespace hdeploy {
namespace {

constexpr std::array<std::string_view, 37> kKeywords = {
    "auto",     "break",    "case",     "char",     "const",      "continue",
    "default",  "do",       "double",   "else",     "enum",       "extern",
    "float",    "for",      "goto",     "if",       "inline",     "int",
    "long",     "register", "restrict", "return",   "short",      "signed",
    "sizeof",   "static",   "struct",   "switch",   "typedef",    "union",
    "unsigned", "void",     "volatile", "while",    "_Bool",      "_Complex",
    "_Imaginary",
};

// Longest first so the first hit is the maximal munch.
constexpr std::array<std::string_view, 23> kMultiPunct = {
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&",  "||",  "*=",  "/=", "%=", "+=", "-=", "&=", "^=", "|=", "##",
};

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}
bool is_continuation_byte(char c) {
  return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

class Scanner {
 public:
  explicit Scanner(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (!eof()) {
      const char c = peek();
      if (c == '\\' && peek(1) == '\n') {
        advance(2);
        continue;
      }
      if (is_space(c)) {
        advance();
        continue;
      }
      if (c == '#' && at_line_start_) {
        skip_directive();
        continue;
      }
      at_line_start_ = false;
      if (c == '/' && peek(1) == '/') {
        skip_line_comment();
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        skip_block_comment();
        continue;
      }
      out.push_back(next_token());
    }
    return out;
  }

 private:
  bool eof() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && !eof(); ++i) {
      const char c = src_[pos_++];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        at_line_start_ = true;
      } else if (!is_continuation_byte(c)) {
        ++col_;
      }
    }
  }

  void skip_directive() {
    while (!eof() && peek() != '\n') {
      if (peek() == '\\' && peek(1) == '\n') advance();
      advance();
    }
  }

  void skip_line_comment() {
    while (!eof() && peek() != '\n') advance();
  }

  void skip_block_comment() {
    const auto line = line_, col = col_;
    advance(2);
    while (!eof()) {
      if (peek() == '*' && peek(1) == '/') {
        advance(2);
        at_line_start_ = false;
        return;
      }
      advance();
    }
    throw LexError(LexError::Kind::UnterminatedComment, line, col);
  }

  Token next_token() {
    Token tok;
    tok.line = line_;
    tok.col = col_;
    const std::size_t start = pos_;
    const char c = peek();

    if (is_ident_start(c)) {
      std::size_t len = 1;
      while (is_ident_char(peek(len))) ++len;
      const std::string_view word = src_.substr(pos_, len);
      const char after = peek(len);
      const bool literal_prefix =
          word == "L" || word == "u" || word == "U" || word == "u8";
      if (literal_prefix && (after == '"' || after == '\'')) {
        advance(len);
        return quoted(std::move(tok), start, after);
      }
      advance(len);
      tok.kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Ident;
      tok.text = std::string(word);
      return tok;
    }

    if (is_digit(c) || (c == '.' && is_digit(peek(1)))) return number(std::move(tok), start);

    if (c == '"' || c == '\'') return quoted(std::move(tok), start, c);

    for (std::string_view p : kMultiPunct) {
      if (src_.substr(pos_, p.size()) == p) {
        advance(p.size());
        tok.kind = TokenKind::Punct;
        tok.text = std::string(p);
        return tok;
      }
    }

    // Any other character, ASCII or not, stands alone as punctuation.
    std::size_t len = 1;
    while (pos_ + len < src_.size() && is_continuation_byte(src_[pos_ + len])) ++len;
    advance(len);
    tok.kind = TokenKind::Punct;
    tok.text = std::string(src_.substr(start, len));
    return tok;
  }

  // C preprocessing-number: digits, letters, '_', '.', and a sign right
  // after an exponent marker.
  Token number(Token tok, std::size_t start) {
    const bool hex = peek() == '0' && (peek(1) == 'x' || peek(1) == 'X');
    bool is_float = false;
    std::size_t len = 0;
    while (true) {
      const char ch = peek(len);
      if (is_ident_char(ch) || ch == '.') {
        if (ch == '.') is_float = true;
        if (len > 0 && !hex && (ch == 'e' || ch == 'E')) is_float = true;
        if (hex && (ch == 'p' || ch == 'P')) is_float = true;
        ++len;
        continue;
      }
      if ((ch == '+' || ch == '-') && len > 0) {
        const char prev = peek(len - 1);
        const bool exp_marker = hex ? (prev == 'p' || prev == 'P')
                                    : (prev == 'e' || prev == 'E');
        if (exp_marker) {
          ++len;
          continue;
        }
      }
      break;
    }
    advance(len);
    tok.kind = is_float ? TokenKind::FloatLit : TokenKind::IntLit;
    tok.text = std::string(src_.substr(start, len));
    return tok;
  }

  Token quoted(Token tok, std::size_t start, char quote) {
    advance();  // opening quote
    while (true) {
      if (eof() || peek() == '\n')
        throw LexError(LexError::Kind::UnterminatedString, tok.line, tok.col);
      const char ch = peek();
      if (ch == '\\') {
        advance(2);
        continue;
      }
      advance();
      if (ch == quote) break;
    }
    tok.kind = quote == '"' ? TokenKind::StringLit : TokenKind::CharLit;
    tok.text = std::string(src_.substr(start, pos_ - start));
    return tok;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
  bool at_line_start_ = true;
};

std::string describe(LexError::Kind kind, std::uint32_t line, std::uint32_t col) {
  std::string msg = kind == LexError::Kind::UnterminatedString ? "unterminated string literal"
                                                               : "unterminated comment";
  return msg + " at " + std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

LexError::LexError(Kind kind, std::uint32_t line, std::uint32_t col)
    : Error(ErrorCategory::Input, describe(kind, line, col)), kind_(kind), line_(line), col_(col) {}

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword: return "KEYWORD";
    case TokenKind::Ident: return "IDENT";
    case TokenKind::IntLit: return "INT_LIT";
    case TokenKind::FloatLit: return "FLOAT_LIT";
    case TokenKind::StringLit: return "STRING_LIT";
    case TokenKind::CharLit: return "CHAR_LIT";
    case TokenKind::Punct: return "PUNCT";
  }
  return "?";
}

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) { return Scanner(source).run(); }

std::string_view NormalizedToken::display() const noexcept {
  switch (class_) {
    case Class::Param: return "P";
    case Class::Literal: return "L";
    case Class::Lexeme: break;
  }
  return lexeme_;
}

NormalizedSequence normalize(const std::vector<Token>& tokens) {
  NormalizedSequence seq;
  seq.tokens.reserve(tokens.size());
  seq.origin.reserve(tokens.size());
  seq.lines.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    switch (t.kind) {
      case TokenKind::Ident: seq.tokens.push_back(NormalizedToken::param()); break;
      case TokenKind::IntLit:
      case TokenKind::FloatLit:
      case TokenKind::StringLit:
      case TokenKind::CharLit: seq.tokens.push_back(NormalizedToken::literal()); break;
      case TokenKind::Keyword:
      case TokenKind::Punct: seq.tokens.push_back(NormalizedToken::lexeme(t.text)); break;
    }
    seq.origin.push_back(i);
    seq.lines.push_back(t.line);
  }
  return seq;
}

std::string to_string(const NormalizedSequence& seq) {
  std::string out;
  for (const auto& t : seq.tokens) {
    if (!out.empty()) out += ' ';
    out += t.display();
  }
  return out;
}

}  // namespace hdeploy
