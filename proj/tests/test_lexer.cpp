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

#include <doctest.h>

#include <random>
#include <regex>

#include "hdeploy/lexer.hpp"
#include "support/fixtures.hpp"

using namespace hdeploy;
using hdeploy::testing::read_file;
using hdeploy::testing::app_path;

namespace {

// Reference lexer for comment-free, directive-free ASCII input: one regex
// alternation applied repeatedly at the cursor.
std::vector<std::pair<TokenKind, std::string>> reference_lex(const std::string& src) {
  static const std::regex token_re(
      R"(^(?:([A-Za-z_][A-Za-z0-9_]*)|([0-9]+\.[0-9]*|\.[0-9]+)|([0-9]+)|(<<=|>>=|\.\.\.|->|\+\+|--|<<|>>|<=|>=|==|!=|&&|\|\||\*=|/=|%=|\+=|-=|&=|\^=|\|=|##|[\[\](){}.&*+\-~!/%<>^|?:;=,#])))");
  std::vector<std::pair<TokenKind, std::string>> out;
  std::size_t pos = 0;
  while (pos < src.size()) {
    if (std::isspace(static_cast<unsigned char>(src[pos]))) {
      ++pos;
      continue;
    }
    std::smatch m;
    const std::string rest = src.substr(pos);
    REQUIRE(std::regex_search(rest, m, token_re));
    TokenKind kind = TokenKind::Punct;
    if (m[1].matched) kind = is_keyword(m[1].str()) ? TokenKind::Keyword : TokenKind::Ident;
    if (m[2].matched) kind = TokenKind::FloatLit;
    if (m[3].matched) kind = TokenKind::IntLit;
    out.emplace_back(kind, m[0].str());
    pos += m[0].length();
  }
  return out;
}

std::vector<std::pair<TokenKind, std::string>> kinds_and_text(const std::vector<Token>& toks) {
  std::vector<std::pair<TokenKind, std::string>> out;
  for (const auto& t : toks) out.emplace_back(t.kind, t.text);
  return out;
}

}  // namespace

TEST_CASE("tokenize: empty input yields no tokens") { CHECK(tokenize("").empty()); }

TEST_CASE("tokenize: for-loop header") {
  const auto toks = tokenize("for(i=0;i<n;i++)");
  using K = TokenKind;
  const std::vector<std::pair<K, std::string>> expected = {
      {K::Keyword, "for"}, {K::Punct, "("}, {K::Ident, "i"}, {K::Punct, "="},  {K::IntLit, "0"},
      {K::Punct, ";"},     {K::Ident, "i"}, {K::Punct, "<"}, {K::Ident, "n"},  {K::Punct, ";"},
      {K::Ident, "i"},     {K::Punct, "++"}, {K::Punct, ")"},
  };
  CHECK(kinds_and_text(toks) == expected);
  CHECK(reference_lex("for(i=0;i<n;i++)") == expected);
  for (std::size_t i = 0; i < toks.size(); ++i) CHECK(toks[i].line == 1);
  CHECK(toks[0].col == 1);
  CHECK(toks[2].col == 5);
  CHECK(toks[11].col == 14);
  CHECK(toks[12].col == 16);
}

TEST_CASE("tokenize: comments produce nothing") {
  const auto toks = tokenize("/* x */ y");
  REQUIRE(toks.size() == 1);
  CHECK(toks[0].kind == TokenKind::Ident);
  CHECK(toks[0].text == "y");
  CHECK(toks[0].col == 9);
  CHECK(tokenize("a // trailing\n// whole line\nb").size() == 2);
}

TEST_CASE("tokenize: preprocessor lines are skipped whole") {
  const auto toks = tokenize("#include <stdio.h>\n  #define F(x) \\\n   (x + 1)\nint y;\na # b");
  std::vector<std::string> texts;
  for (const auto& t : toks) texts.push_back(t.text);
  CHECK(texts == std::vector<std::string>{"int", "y", ";", "a", "#", "b"});
  CHECK(toks[0].line == 4);
}

TEST_CASE("tokenize: maximal munch punctuation") {
  std::vector<std::string> texts;
  for (const auto& t : tokenize("a<<=b>>c->d...e<=f&&g||h!=i")) texts.push_back(t.text);
  CHECK(texts == std::vector<std::string>{"a", "<<=", "b", ">>", "c", "->", "d", "...", "e", "<=", "f", "&&", "g",
                                          "||", "h", "!=", "i"});
  std::vector<std::string> plus;
  for (const auto& t : tokenize("x+++y")) plus.push_back(t.text);
  CHECK(plus == std::vector<std::string>{"x", "++", "+", "y"});
}

TEST_CASE("tokenize: literal kinds") {
  const auto toks = tokenize(R"(1 0x1F 1.5f .5 1e-3 0x1p+4 "s\"q" 'c' '\n' L"w" u8"x" 10UL)");
  using K = TokenKind;
  std::vector<K> kinds;
  for (const auto& t : toks) kinds.push_back(t.kind);
  CHECK(kinds == std::vector<K>{K::IntLit, K::IntLit, K::FloatLit, K::FloatLit, K::FloatLit, K::FloatLit,
                                K::StringLit, K::CharLit, K::CharLit, K::StringLit, K::StringLit, K::IntLit});
  CHECK(toks[6].text == R"("s\"q")");
  CHECK(toks[9].text == R"(L"w")");
}

TEST_CASE("tokenize: positions are 1-based and track lines") {
  const auto toks = tokenize("int a;\n  a = 1;\n");
  REQUIRE(toks.size() == 7);
  CHECK(toks[3].text == "a");
  CHECK(toks[3].line == 2);
  CHECK(toks[3].col == 3);
}

TEST_CASE("tokenize: unknown characters stand alone as punctuation") {
  const auto toks = tokenize("a @ \xC3\xA9 b");
  REQUIRE(toks.size() == 4);
  CHECK(toks[1].text == "@");
  CHECK(toks[2].text == "\xC3\xA9");
  CHECK(toks[3].col == 7);
}

TEST_CASE("tokenize: errors carry the opening position") {
  SUBCASE("string") {
    try {
      tokenize("x = \"abc\ny");
      FAIL("expected LexError");
    } catch (const LexError& e) {
      CHECK(e.kind() == LexError::Kind::UnterminatedString);
      CHECK(e.line() == 1);
      CHECK(e.col() == 5);
    }
  }
  SUBCASE("char") { CHECK_THROWS_AS(tokenize("'a"), LexError); }
  SUBCASE("comment") {
    try {
      tokenize("a\n  /* never closed");
      FAIL("expected LexError");
    } catch (const LexError& e) {
      CHECK(e.kind() == LexError::Kind::UnterminatedComment);
      CHECK(e.line() == 2);
      CHECK(e.col() == 3);
    }
  }
}

TEST_CASE("tokenize agrees with the reference lexer on random punctuation soup") {
  static const std::vector<std::string> pieces = {"a", "b1", "_x", "for", "while", "12", "3.5", "+", "-", "<",
                                                  ">", "=", "&", "|", "!", ".", "*", "/", "(", ")", ";", "%", "^"};
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    std::string src;
    const std::size_t n = 1 + rng() % 40;
    for (std::size_t i = 0; i < n; ++i) {
      std::string piece = pieces[rng() % pieces.size()];
      // Keep '/' from opening a comment and '.' from gluing onto numbers.
      if (!src.empty() && src.back() == '/' && (piece[0] == '/' || piece[0] == '*')) src += ' ';
      if (!src.empty() && (std::isdigit(static_cast<unsigned char>(src.back())) || src.back() == '.' ||
                           std::isalpha(static_cast<unsigned char>(src.back())) || src.back() == '_'))
        src += ' ';
      src += piece;
      if (rng() % 3 == 0) src += ' ';
    }
    INFO(src);
    CHECK(kinds_and_text(tokenize(src)) == reference_lex(src));
  }
}

TEST_CASE("normalize maps identifiers to P and literals to L") {
  CHECK(normalize({}).empty());
  const auto a = normalize(tokenize("a = b + 1;"));
  CHECK(to_string(a) == "P = P + L ;");
  const auto b = normalize(tokenize("x = y + 2;"));
  CHECK(a.tokens == b.tokens);
  CHECK(a.origin == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  CHECK(to_string(normalize(tokenize("s = \"x\" ; c = 'q' ; f = 2.0 ;"))) == "P = L ; P = L ; P = L ;");
  // An identifier spelled "P" is still the identifier class.
  CHECK(normalize(tokenize("P")).tokens == normalize(tokenize("L")).tokens);
}

TEST_CASE("normalize: renaming and literal edits are invisible") {
  std::mt19937_64 rng(11);
  const std::string src = read_file(hdeploy::testing::app_path("app_all.c"));
  const auto base = normalize(tokenize(src));
  for (int i = 0; i < 20; ++i) {
    const auto renamed = normalize(tokenize(hdeploy::testing::random_rename(rng, src)));
    CHECK(renamed.tokens == base.tokens);
    CHECK(renamed.lines == base.lines);
  }
}

TEST_CASE("tokenize and normalize are deterministic") {
  const std::string src = read_file(hdeploy::testing::app_path("app_conv.c"));
  CHECK(tokenize(src) == tokenize(src));
  CHECK(normalize(tokenize(src)) == normalize(tokenize(src)));
}
