#include "hecix/cypher/parser.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>

#include "hecix/cypher/render.hpp"
#include "hecix/errors.hpp"

namespace hecix::cypher {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

class Parser {
public:
  explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {}

  QueryAst parse_query() {
    QueryAst ast;
    expect_keyword("MATCH");
    ast.match_patterns.push_back(parse_pattern());
    while (accept(TokenKind::Comma)) ast.match_patterns.push_back(parse_pattern());

    if (accept_keyword("WHERE")) {
      const std::size_t pos = peek().position;
      Expr where = parse_or();
      if (where.contains_aggregate()) throw ParseError("non-aggregate predicate", "aggregate", pos);
      ast.where_clause = std::move(where);
    }

    expect_keyword("RETURN");
    ast.distinct = accept_keyword("DISTINCT");
    ast.return_items.push_back(parse_return_item());
    while (accept(TokenKind::Comma)) ast.return_items.push_back(parse_return_item());

    if (accept_keyword("ORDER")) {
      expect_keyword("BY");
      ast.order_by.push_back(parse_order_item());
      while (accept(TokenKind::Comma)) ast.order_by.push_back(parse_order_item());
    }
    if (accept_keyword("SKIP")) ast.skip = parse_count();
    if (accept_keyword("LIMIT")) ast.limit = parse_count();
    if (peek().kind != TokenKind::End) throw error("end of query");
    return ast;
  }

private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t idx = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[idx];
  }

  const Token& advance() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }

  ParseError error(const std::string& expected) const {
    return ParseError(expected, describe(peek()), peek().position);
  }

  bool accept(TokenKind kind) {
    if (peek().kind != kind) return false;
    advance();
    return true;
  }

  void expect(TokenKind kind, const std::string& what) {
    if (!accept(kind)) throw error(what);
  }

  bool accept_keyword(std::string_view kw) {
    if (!peek().is_keyword(kw)) return false;
    advance();
    return true;
  }

  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) throw error(std::string(kw));
  }

  std::string expect_name(const std::string& what) {
    if (peek().kind != TokenKind::Identifier) throw error(what);
    return advance().text;
  }

  std::int64_t parse_count() {
    const Token& t = peek();
    if (t.kind != TokenKind::Integer || t.int_value < 0) throw error("non-negative integer");
    advance();
    return t.int_value;
  }

  Scalar parse_literal() {
    bool negative = false;
    if (peek().kind == TokenKind::Minus &&
        (peek(1).kind == TokenKind::Integer || peek(1).kind == TokenKind::Float)) {
      advance();
      negative = true;
    }
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::String:
        advance();
        return t.text;
      case TokenKind::Integer:
        advance();
        if (t.int_value == std::numeric_limits<std::int64_t>::min()) {
          if (!negative) throw ParseError("integer in range", t.text, t.position);
          return t.int_value;
        }
        return negative ? -t.int_value : t.int_value;
      case TokenKind::Float:
        advance();
        return negative ? -t.float_value : t.float_value;
      case TokenKind::Keyword:
        if (t.text == "TRUE" && !negative) {
          advance();
          return true;
        }
        if (t.text == "FALSE" && !negative) {
          advance();
          return false;
        }
        break;
      default:
        break;
    }
    throw error("literal");
  }

  bool at_literal() const {
    const Token& t = peek();
    return t.kind == TokenKind::String || t.kind == TokenKind::Integer ||
           t.kind == TokenKind::Float || t.is_keyword("TRUE") || t.is_keyword("FALSE") ||
           (t.kind == TokenKind::Minus &&
            (peek(1).kind == TokenKind::Integer || peek(1).kind == TokenKind::Float));
  }

  NodePattern parse_node() {
    expect(TokenKind::LParen, "'('");
    NodePattern node;
    if (peek().kind == TokenKind::Identifier) node.variable = advance().text;
    if (accept(TokenKind::Colon)) node.label = expect_name("label");
    if (accept(TokenKind::LBrace)) {
      do {
        const std::size_t pos = peek().position;
        std::string key = expect_name("property key");
        expect(TokenKind::Colon, "':'");
        Scalar value = parse_literal();
        for (const auto& [existing, _] : node.properties) {
          if (existing == key) throw ParseError("distinct property key", "duplicate '" + key + "'", pos);
        }
        node.properties.emplace_back(std::move(key), std::move(value));
      } while (accept(TokenKind::Comma));
      expect(TokenKind::RBrace, "'}'");
    }
    expect(TokenKind::RParen, "')'");
    return node;
  }

  bool at_rel() const {
    return peek().kind == TokenKind::Minus ||
           (peek().kind == TokenKind::Lt && peek(1).kind == TokenKind::Minus);
  }

  RelPattern parse_rel() {
    RelPattern rel;
    bool left = false;
    if (accept(TokenKind::Lt)) left = true;
    expect(TokenKind::Minus, "'-'");
    if (accept(TokenKind::LBracket)) {
      if (peek().kind == TokenKind::Identifier) rel.variable = advance().text;
      if (accept(TokenKind::Colon)) rel.rel_type = expect_name("relationship type");
      expect(TokenKind::RBracket, "']'");
    }
    expect(TokenKind::Minus, "'-'");
    const std::size_t arrow_pos = peek().position;
    const bool right = accept(TokenKind::Gt);
    if (left && right) throw ParseError("at most one arrowhead", "'<-...->'", arrow_pos);
    rel.direction = left ? RelDirection::Left : right ? RelDirection::Right : RelDirection::Undirected;
    return rel;
  }

  PathPattern parse_pattern() {
    PathPattern path;
    path.nodes.push_back(parse_node());
    while (at_rel()) {
      path.rels.push_back(parse_rel());
      path.nodes.push_back(parse_node());
    }
    return path;
  }

  // expr := var | var.key | function(...) | literal
  Expr parse_expr() {
    if (at_literal()) return Expr::lit(parse_literal());
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier) throw error("expression");
    if (!t.quoted && peek(1).kind == TokenKind::LParen) {
      const std::string fn = lower(t.text);
      const std::size_t pos = t.position;
      advance();
      advance();
      Expr out;
      if (fn == "count") {
        if (accept(TokenKind::Star)) {
          out = Expr::count_star();
        } else {
          Expr arg = parse_expr();
          if (arg.contains_aggregate()) throw ParseError("non-aggregate argument", "aggregate", pos);
          out = Expr::unary(Expr::Kind::Count, std::move(arg));
        }
      } else if (fn == "collect") {
        Expr arg = parse_expr();
        if (arg.contains_aggregate()) throw ParseError("non-aggregate argument", "aggregate", pos);
        out = Expr::unary(Expr::Kind::Collect, std::move(arg));
      } else if (fn == "tolower") {
        Expr arg = parse_expr();
        if (arg.contains_aggregate()) throw ParseError("non-aggregate argument", "aggregate", pos);
        out = Expr::unary(Expr::Kind::ToLower, std::move(arg));
      } else {
        throw ParseError("count, collect or toLower", "function '" + t.text + "'", pos);
      }
      expect(TokenKind::RParen, "')'");
      return out;
    }
    std::string name = advance().text;
    if (accept(TokenKind::Dot)) return Expr::property(std::move(name), expect_name("property key"));
    return Expr::variable(std::move(name));
  }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (accept_keyword("OR")) lhs = Expr::binary(Expr::Kind::Or, std::move(lhs), parse_and());
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_not();
    while (accept_keyword("AND")) lhs = Expr::binary(Expr::Kind::And, std::move(lhs), parse_not());
    return lhs;
  }

  Expr parse_not() {
    if (accept_keyword("NOT")) return Expr::unary(Expr::Kind::Not, parse_not());
    return parse_predicate();
  }

  Expr parse_predicate() {
    if (accept(TokenKind::LParen)) {
      Expr inner = parse_or();
      expect(TokenKind::RParen, "')'");
      return inner;
    }
    Expr lhs = parse_expr();
    const Token& t = peek();
    auto cmp = [&](CompareOp op) {
      advance();
      return Expr::comparison(op, std::move(lhs), parse_expr());
    };
    switch (t.kind) {
      case TokenKind::Eq: return cmp(CompareOp::Eq);
      case TokenKind::Neq: return cmp(CompareOp::Neq);
      case TokenKind::Lt: return cmp(CompareOp::Lt);
      case TokenKind::Le: return cmp(CompareOp::Le);
      case TokenKind::Gt: return cmp(CompareOp::Gt);
      case TokenKind::Ge: return cmp(CompareOp::Ge);
      default: break;
    }
    if (accept_keyword("CONTAINS")) return Expr::text(StringOp::Contains, std::move(lhs), parse_expr());
    if (accept_keyword("STARTS")) {
      expect_keyword("WITH");
      return Expr::text(StringOp::StartsWith, std::move(lhs), parse_expr());
    }
    if (accept_keyword("ENDS")) {
      expect_keyword("WITH");
      return Expr::text(StringOp::EndsWith, std::move(lhs), parse_expr());
    }
    return lhs;
  }

  ReturnItem parse_return_item() {
    ReturnItem item{parse_expr(), std::nullopt};
    if (accept_keyword("AS")) item.alias = expect_name("alias");
    return item;
  }

  OrderItem parse_order_item() {
    OrderItem item{parse_expr(), false};
    if (accept_keyword("DESC") || accept_keyword("DESCENDING")) {
      item.descending = true;
    } else if (!accept_keyword("ASC")) {
      accept_keyword("ASCENDING");
    }
    return item;
  }

  const std::vector<Token>& tokens_;
  std::size_t pos_ = 0;
};

void collect_variables(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == Expr::Kind::Variable || e.kind == Expr::Kind::Property) out.push_back(e.name);
  for (const auto& a : e.args) collect_variables(a, out);
}

void check_scope(const QueryAst& ast) {
  std::map<std::string, bool> kinds;  // true = node variable
  for (const auto& p : ast.match_patterns) {
    auto bind = [&](const std::optional<std::string>& var, bool is_node) {
      if (!var) return;
      auto [it, inserted] = kinds.emplace(*var, is_node);
      if (!inserted && it->second != is_node) {
        throw ParseError("consistent variable kind", "'" + *var + "' used as node and relationship", 0);
      }
    };
    for (const auto& n : p.nodes) bind(n.variable, true);
    for (const auto& r : p.rels) bind(r.variable, false);
  }

  auto require_bound = [&](const Expr& e) {
    std::vector<std::string> vars;
    collect_variables(e, vars);
    for (const auto& v : vars) {
      if (!kinds.contains(v)) throw UnboundVariable(v);
    }
  };
  if (ast.where_clause) require_bound(*ast.where_clause);
  for (const auto& item : ast.return_items) require_bound(item.expr);

  const bool projected_only = ast.distinct || ast.has_aggregation();
  for (const auto& item : ast.order_by) {
    if (resolve_order_column(ast, item) >= 0) continue;
    require_bound(item.expr);
    if (projected_only || item.expr.contains_aggregate()) {
      throw ParseError("ORDER BY expression that appears in RETURN", render(item.expr), 0);
    }
  }
}

}  // namespace

Expr Expr::variable(std::string name) {
  Expr e;
  e.kind = Kind::Variable;
  e.name = std::move(name);
  return e;
}

Expr Expr::property(std::string name, std::string key) {
  Expr e;
  e.kind = Kind::Property;
  e.name = std::move(name);
  e.key = std::move(key);
  return e;
}

Expr Expr::lit(Scalar value) {
  Expr e;
  e.kind = Kind::Literal;
  e.literal = std::move(value);
  return e;
}

Expr Expr::count_star() {
  Expr e;
  e.kind = Kind::CountStar;
  return e;
}

Expr Expr::unary(Kind kind, Expr arg) {
  Expr e;
  e.kind = kind;
  e.args.push_back(std::move(arg));
  return e;
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = kind;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

Expr Expr::comparison(CompareOp op, Expr lhs, Expr rhs) {
  Expr e = binary(Kind::Compare, std::move(lhs), std::move(rhs));
  e.compare = op;
  return e;
}

Expr Expr::text(StringOp op, Expr lhs, Expr rhs) {
  Expr e = binary(Kind::Text, std::move(lhs), std::move(rhs));
  e.text_op = op;
  return e;
}

bool Expr::contains_aggregate() const {
  if (is_aggregate()) return true;
  return std::any_of(args.begin(), args.end(), [](const Expr& a) { return a.contains_aggregate(); });
}

bool QueryAst::has_aggregation() const {
  return std::any_of(return_items.begin(), return_items.end(),
                     [](const ReturnItem& i) { return i.expr.contains_aggregate(); });
}

QueryAst parse(const std::vector<Token>& tokens) {
  if (tokens.empty() || tokens.back().kind != TokenKind::End) {
    throw ParseError("token stream", "unterminated token list", 0);
  }
  QueryAst ast = Parser(tokens).parse_query();
  check_scope(ast);
  return ast;
}

QueryAst parse(std::string_view text) { return parse(tokenize(text)); }

std::set<std::string> bound_variables(const QueryAst& ast) {
  std::set<std::string> out;
  for (const auto& p : ast.match_patterns) {
    for (const auto& n : p.nodes) {
      if (n.variable) out.insert(*n.variable);
    }
    for (const auto& r : p.rels) {
      if (r.variable) out.insert(*r.variable);
    }
  }
  return out;
}

std::string column_name(const ReturnItem& item) {
  return item.alias ? *item.alias : render(item.expr);
}

int resolve_order_column(const QueryAst& ast, const OrderItem& item) {
  if (item.expr.kind == Expr::Kind::Variable) {
    for (std::size_t i = 0; i < ast.return_items.size(); ++i) {
      if (ast.return_items[i].alias == item.expr.name) return static_cast<int>(i);
    }
  }
  for (std::size_t i = 0; i < ast.return_items.size(); ++i) {
    if (ast.return_items[i].expr == item.expr) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace hecix::cypher
