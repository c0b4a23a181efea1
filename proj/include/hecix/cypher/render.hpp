#pragma once

#include <string>
#include <string_view>

#include "hecix/cypher/ast.hpp"

namespace hecix::cypher {

// Canonical text: upper-case keywords, single-quoted strings, backticks for
// names that are not plain identifiers or collide with keywords, minimal
// parentheses. parse(render(ast)) == ast.
std::string render(const QueryAst& ast);
std::string render(const Expr& expr);

std::string quote_name(std::string_view name);
std::string quote_string(std::string_view value);
std::string render_literal(const Scalar& value);

}  // namespace hecix::cypher
