#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hecix/graph/value.hpp"

namespace hecix::cypher {

enum class CompareOp { Eq, Neq, Lt, Le, Gt, Ge };
enum class StringOp { Contains, StartsWith, EndsWith };

// Expression tree for both projections and predicates.
struct Expr {
  enum class Kind {
    Variable,   // name
    Property,   // name.key
    Literal,    // literal
    CountStar,  // count(*)
    Count,      // count(args[0])
    Collect,    // collect(args[0])
    ToLower,    // toLower(args[0])
    Compare,    // args[0] <op> args[1]
    Text,       // args[0] CONTAINS|STARTS WITH|ENDS WITH args[1]
    And,
    Or,
    Not,
  };

  Kind kind = Kind::Literal;
  std::string name;
  std::string key;
  Scalar literal = std::int64_t{0};
  CompareOp compare = CompareOp::Eq;
  StringOp text_op = StringOp::Contains;
  std::vector<Expr> args;

  bool operator==(const Expr&) const = default;

  static Expr variable(std::string name);
  static Expr property(std::string name, std::string key);
  static Expr lit(Scalar value);
  static Expr count_star();
  static Expr unary(Kind kind, Expr arg);
  static Expr binary(Kind kind, Expr lhs, Expr rhs);
  static Expr comparison(CompareOp op, Expr lhs, Expr rhs);
  static Expr text(StringOp op, Expr lhs, Expr rhs);

  bool is_aggregate() const {
    return kind == Kind::CountStar || kind == Kind::Count || kind == Kind::Collect;
  }
  bool contains_aggregate() const;
};

enum class RelDirection { Right, Left, Undirected };

struct NodePattern {
  std::optional<std::string> variable;
  std::optional<std::string> label;
  std::vector<std::pair<std::string, Scalar>> properties;

  bool operator==(const NodePattern&) const = default;
};

struct RelPattern {
  std::optional<std::string> variable;
  std::optional<std::string> rel_type;
  RelDirection direction = RelDirection::Undirected;

  bool operator==(const RelPattern&) const = default;
};

// nodes.size() == rels.size() + 1; rels[i] joins nodes[i] and nodes[i+1].
struct PathPattern {
  std::vector<NodePattern> nodes;
  std::vector<RelPattern> rels;

  bool operator==(const PathPattern&) const = default;
};

struct ReturnItem {
  Expr expr;
  std::optional<std::string> alias;

  bool operator==(const ReturnItem&) const = default;
};

struct OrderItem {
  Expr expr;
  bool descending = false;

  bool operator==(const OrderItem&) const = default;
};

struct QueryAst {
  std::vector<PathPattern> match_patterns;
  std::optional<Expr> where_clause;
  bool distinct = false;
  std::vector<ReturnItem> return_items;
  std::vector<OrderItem> order_by;
  std::optional<std::int64_t> skip;
  std::optional<std::int64_t> limit;

  bool operator==(const QueryAst&) const = default;

  bool has_aggregation() const;
};

}  // namespace hecix::cypher
