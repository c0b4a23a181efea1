#include "hecix/cypher/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>

#include "hecix/errors.hpp"

namespace hecix::cypher {

namespace {

constexpr std::array<std::string_view, 22> kKeywords = {
    "MATCH", "WHERE",     "RETURN",     "DISTINCT", "AS",       "ORDER", "BY",   "ASC",
    "DESC",  "ASCENDING", "DESCENDING", "SKIP",     "LIMIT",    "AND",   "OR",   "NOT",
    "FALSE", "CONTAINS",  "STARTS",     "ENDS",     "WITH",     "TRUE"};

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_part(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

bool is_keyword(std::string_view word) {
  const std::string u = upper(word);
  return std::find(kKeywords.begin(), kKeywords.end(), u) != kKeywords.end();
}

std::string describe(const Token& token) {
  switch (token.kind) {
    case TokenKind::Keyword: return token.text;
    case TokenKind::Identifier: return "identifier '" + token.text + "'";
    case TokenKind::String: return "string literal";
    case TokenKind::Integer: return "integer " + token.text;
    case TokenKind::Float: return "float " + token.text;
    case TokenKind::End: return "end of input";
    default: return "'" + token.text + "'";
  }
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();

  auto punct = [&](TokenKind kind, std::size_t len) {
    Token t;
    t.kind = kind;
    t.text = std::string(text.substr(i, len));
    t.position = i;
    tokens.push_back(std::move(t));
    i += len;
  };

  while (i < n) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;

    if (ident_start(c)) {
      while (i < n && ident_part(text[i])) ++i;
      std::string_view word = text.substr(start, i - start);
      Token t;
      t.position = start;
      if (is_keyword(word)) {
        t.kind = TokenKind::Keyword;
        t.text = upper(word);
      } else {
        t.kind = TokenKind::Identifier;
        t.text = std::string(word);
      }
      tokens.push_back(std::move(t));
      continue;
    }

    if (c == '`') {
      std::string value;
      ++i;
      bool closed = false;
      while (i < n) {
        if (text[i] == '`') {
          if (i + 1 < n && text[i + 1] == '`') {
            value.push_back('`');
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        value.push_back(text[i++]);
      }
      if (!closed) throw LexError(start, "unterminated quoted identifier");
      if (value.empty()) throw LexError(start, "empty quoted identifier");
      Token t;
      t.kind = TokenKind::Identifier;
      t.text = std::move(value);
      t.quoted = true;
      t.position = start;
      tokens.push_back(std::move(t));
      continue;
    }

    if (c == '\'' || c == '"') {
      const char quote = c;
      std::string value;
      ++i;
      bool closed = false;
      while (i < n) {
        char ch = text[i];
        if (ch == quote) {
          ++i;
          closed = true;
          break;
        }
        if (ch == '\\') {
          if (i + 1 >= n) break;
          const char esc = text[i + 1];
          i += 2;
          switch (esc) {
            case 'n': value.push_back('\n'); break;
            case 't': value.push_back('\t'); break;
            case 'r': value.push_back('\r'); break;
            case 'b': value.push_back('\b'); break;
            case 'f': value.push_back('\f'); break;
            case '\\': value.push_back('\\'); break;
            case '\'': value.push_back('\''); break;
            case '"': value.push_back('"'); break;
            case 'u': {
              if (i + 4 > n) throw LexError(i - 2, "truncated unicode escape");
              std::uint32_t cp = 0;
              auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + i + 4, cp, 16);
              if (ec != std::errc{} || ptr != text.data() + i + 4) {
                throw LexError(i - 2, "bad unicode escape");
              }
              append_utf8(value, cp);
              i += 4;
              break;
            }
            default:
              throw LexError(i - 2, std::string("unknown escape '\\") + esc + "'");
          }
          continue;
        }
        value.push_back(ch);
        ++i;
      }
      if (!closed) throw LexError(start, "unterminated string");
      Token t;
      t.kind = TokenKind::String;
      t.text = std::move(value);
      t.position = start;
      tokens.push_back(std::move(t));
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      bool is_float = false;
      if (i + 1 < n && text[i] == '.' && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
        is_float = true;
        ++i;
        while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      }
      if (i < n && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (text[j] == '+' || text[j] == '-')) ++j;
        if (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) {
          is_float = true;
          i = j;
          while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        }
      }
      if (i < n && ident_part(text[i])) throw LexError(i, "illegal character in number");
      Token t;
      t.position = start;
      t.text = std::string(text.substr(start, i - start));
      if (is_float) {
        t.kind = TokenKind::Float;
        t.float_value = std::strtod(t.text.c_str(), nullptr);
      } else {
        t.kind = TokenKind::Integer;
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        // 2^63 is admitted so that a preceding minus can form INT64_MIN.
        if (ec != std::errc{} || v > (std::uint64_t{1} << 63)) {
          throw LexError(start, "integer out of range");
        }
        t.int_value = static_cast<std::int64_t>(v);
      }
      tokens.push_back(std::move(t));
      continue;
    }

    switch (c) {
      case '(': punct(TokenKind::LParen, 1); break;
      case ')': punct(TokenKind::RParen, 1); break;
      case '[': punct(TokenKind::LBracket, 1); break;
      case ']': punct(TokenKind::RBracket, 1); break;
      case '{': punct(TokenKind::LBrace, 1); break;
      case '}': punct(TokenKind::RBrace, 1); break;
      case ':': punct(TokenKind::Colon, 1); break;
      case ',': punct(TokenKind::Comma, 1); break;
      case '.': punct(TokenKind::Dot, 1); break;
      case '*': punct(TokenKind::Star, 1); break;
      case '-': punct(TokenKind::Minus, 1); break;
      case '=': punct(TokenKind::Eq, 1); break;
      case '<':
        if (i + 1 < n && text[i + 1] == '>') punct(TokenKind::Neq, 2);
        else if (i + 1 < n && text[i + 1] == '=') punct(TokenKind::Le, 2);
        else punct(TokenKind::Lt, 1);
        break;
      case '>':
        if (i + 1 < n && text[i + 1] == '=') punct(TokenKind::Ge, 2);
        else punct(TokenKind::Gt, 1);
        break;
      case '!':
        if (i + 1 < n && text[i + 1] == '=') {
          punct(TokenKind::Neq, 2);
          break;
        }
        throw LexError(i, "illegal character '!'");
      default:
        throw LexError(i, std::string("illegal character '") + c + "'");
    }
  }
  Token end;
  end.kind = TokenKind::End;
  end.position = n;
  tokens.push_back(std::move(end));
  return tokens;
}

}  // namespace hecix::cypher
