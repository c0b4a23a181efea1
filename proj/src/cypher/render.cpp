#include "hecix/cypher/render.hpp"

#include <cctype>
#include <cstdio>

#include "hecix/cypher/lexer.hpp"

namespace hecix::cypher {

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Or: return 1;
    case Expr::Kind::And: return 2;
    case Expr::Kind::Not: return 3;
    case Expr::Kind::Compare:
    case Expr::Kind::Text: return 4;
    default: return 5;
  }
}

const char* compare_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return " = ";
    case CompareOp::Neq: return " <> ";
    case CompareOp::Lt: return " < ";
    case CompareOp::Le: return " <= ";
    case CompareOp::Gt: return " > ";
    case CompareOp::Ge: return " >= ";
  }
  return " = ";
}

const char* text_op_text(StringOp op) {
  switch (op) {
    case StringOp::Contains: return " CONTAINS ";
    case StringOp::StartsWith: return " STARTS WITH ";
    case StringOp::EndsWith: return " ENDS WITH ";
  }
  return " CONTAINS ";
}

void render_expr(const Expr& e, std::string& out);

void render_child(const Expr& child, int parent_prec, bool right, std::string& out) {
  const int p = precedence(child);
  const bool parens = p < parent_prec || (right && p == parent_prec && p < 5);
  if (parens) out.push_back('(');
  render_expr(child, out);
  if (parens) out.push_back(')');
}

void render_expr(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::Variable:
      out += quote_name(e.name);
      return;
    case Expr::Kind::Property:
      out += quote_name(e.name);
      out.push_back('.');
      out += quote_name(e.key);
      return;
    case Expr::Kind::Literal:
      out += render_literal(e.literal);
      return;
    case Expr::Kind::CountStar:
      out += "count(*)";
      return;
    case Expr::Kind::Count:
    case Expr::Kind::Collect:
    case Expr::Kind::ToLower:
      out += e.kind == Expr::Kind::Count     ? "count("
             : e.kind == Expr::Kind::Collect ? "collect("
                                             : "toLower(";
      render_expr(e.args.at(0), out);
      out.push_back(')');
      return;
    case Expr::Kind::Compare:
    case Expr::Kind::Text: {
      // Operands of comparisons are atoms in every parsed tree; anything
      // else is wrapped so the output still parses.
      render_child(e.args.at(0), 5, false, out);
      out += e.kind == Expr::Kind::Compare ? compare_text(e.compare) : text_op_text(e.text_op);
      render_child(e.args.at(1), 5, true, out);
      return;
    }
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      const int p = precedence(e);
      render_child(e.args.at(0), p, false, out);
      out += e.kind == Expr::Kind::And ? " AND " : " OR ";
      render_child(e.args.at(1), p, true, out);
      return;
    }
    case Expr::Kind::Not:
      out += "NOT ";
      render_child(e.args.at(0), 3, false, out);
      return;
  }
}

void render_node(const NodePattern& n, std::string& out) {
  out.push_back('(');
  if (n.variable) out += quote_name(*n.variable);
  if (n.label) {
    out.push_back(':');
    out += quote_name(*n.label);
  }
  if (!n.properties.empty()) {
    if (n.variable || n.label) out.push_back(' ');
    out.push_back('{');
    bool first = true;
    for (const auto& [key, value] : n.properties) {
      if (!first) out += ", ";
      first = false;
      out += quote_name(key);
      out += ": ";
      out += render_literal(value);
    }
    out.push_back('}');
  }
  out.push_back(')');
}

void render_rel(const RelPattern& r, std::string& out) {
  out += r.direction == RelDirection::Left ? "<-[" : "-[";
  if (r.variable) out += quote_name(*r.variable);
  if (r.rel_type) {
    out.push_back(':');
    out += quote_name(*r.rel_type);
  }
  out += r.direction == RelDirection::Right ? "]->" : "]-";
}

}  // namespace

std::string quote_name(std::string_view name) {
  bool plain = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) plain = false;
  }
  if (plain && !is_keyword(name)) return std::string(name);
  std::string out = "`";
  for (char c : name) {
    if (c == '`') out.push_back('`');
    out.push_back(c);
  }
  out.push_back('`');
  return out;
}

std::string quote_string(std::string_view value) {
  std::string out = "'";
  for (unsigned char c : value) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04X", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('\'');
  return out;
}

std::string render_literal(const Scalar& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return quote_string(*s);
  return scalar_to_display(value);
}

std::string render(const Expr& expr) {
  std::string out;
  render_expr(expr, out);
  return out;
}

std::string render(const QueryAst& ast) {
  std::string out = "MATCH ";
  for (std::size_t p = 0; p < ast.match_patterns.size(); ++p) {
    if (p) out += ", ";
    const auto& path = ast.match_patterns[p];
    render_node(path.nodes.at(0), out);
    for (std::size_t i = 0; i < path.rels.size(); ++i) {
      render_rel(path.rels[i], out);
      render_node(path.nodes.at(i + 1), out);
    }
  }
  if (ast.where_clause) {
    out += " WHERE ";
    render_expr(*ast.where_clause, out);
  }
  out += ast.distinct ? " RETURN DISTINCT " : " RETURN ";
  for (std::size_t i = 0; i < ast.return_items.size(); ++i) {
    if (i) out += ", ";
    render_expr(ast.return_items[i].expr, out);
    if (ast.return_items[i].alias) {
      out += " AS ";
      out += quote_name(*ast.return_items[i].alias);
    }
  }
  if (!ast.order_by.empty()) {
    out += " ORDER BY ";
    for (std::size_t i = 0; i < ast.order_by.size(); ++i) {
      if (i) out += ", ";
      render_expr(ast.order_by[i].expr, out);
      if (ast.order_by[i].descending) out += " DESC";
    }
  }
  if (ast.skip) out += " SKIP " + std::to_string(*ast.skip);
  if (ast.limit) out += " LIMIT " + std::to_string(*ast.limit);
  return out;
}

}  // namespace hecix::cypher
