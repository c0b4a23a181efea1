#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hecix/cypher/ast.hpp"
#include "hecix/cypher/lexer.hpp"

namespace hecix::cypher {

// Grammar:
//   query   := MATCH pattern ("," pattern)* (WHERE bexpr)?
//              RETURN DISTINCT? item ("," item)*
//              (ORDER BY ordexpr ("," ordexpr)*)? (SKIP int)? (LIMIT int)?
//   pattern := node (rel node)*
//   node    := "(" var? (":" label)? props? ")"
//   rel     := ("<-" | "-") "[" var? (":" reltype)? "]" ("->" | "-")
//   props   := "{" key ":" literal ("," key ":" literal)* "}"
//   item    := expr (AS ident)?
//   expr    := var | var "." key | count "(" (expr | "*") ")"
//            | collect "(" expr ")" | toLower "(" expr ")" | literal
//
// Throws LexError, ParseError, or UnboundVariable.
QueryAst parse(const std::vector<Token>& tokens);
QueryAst parse(std::string_view text);

// Variables bound by the MATCH patterns.
std::set<std::string> bound_variables(const QueryAst& ast);

// Column name of a return item: the alias when present, else rendered text.
std::string column_name(const ReturnItem& item);

// Index of the return column an ORDER BY item refers to, or -1 when it must
// be evaluated against the match binding.
int resolve_order_column(const QueryAst& ast, const OrderItem& item);

}  // namespace hecix::cypher
