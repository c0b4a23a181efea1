#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hecix::cypher {

enum class TokenKind {
  Keyword,      // text holds the upper-cased keyword
  Identifier,   // text holds the identifier; quoted==true when backticked
  String,       // text holds the unescaped value
  Integer,
  Float,
  LParen, RParen, LBracket, RBracket, LBrace, RBrace,
  Colon, Comma, Dot, Star, Minus,
  Eq, Neq, Lt, Le, Gt, Ge,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::size_t position = 0;
  bool quoted = false;
  std::int64_t int_value = 0;
  double float_value = 0.0;

  bool is_keyword(std::string_view kw) const { return kind == TokenKind::Keyword && text == kw; }
};

// Reserved words of the supported subset. Matching is case-insensitive.
bool is_keyword(std::string_view word);

std::string describe(const Token& token);

// Final element is always an End token.
std::vector<Token> tokenize(std::string_view text);

}  // namespace hecix::cypher
