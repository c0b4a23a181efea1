#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hecix/cypher/ast.hpp"
#include "hecix/graph/property_graph.hpp"

// Value-level semantics shared by the evaluator and the brute-force oracle.
// Matching, grouping, deduplication and ordering are implemented separately
// by each of them; only these primitives are common.
namespace hecix::cypher {

struct EvalOptions {
  // Type-mismatched comparisons raise EvalError instead of yielding false.
  bool strict = false;
  // OpenMP worker count for the evaluator; 0 uses the runtime default.
  int threads = 0;
};

// Total order: numbers < strings < booleans < nodes < edges < lists < null.
// Ints and doubles compare numerically.
int compare_values(const Value& a, const Value& b);

inline bool equivalent(const Value& a, const Value& b) { return compare_values(a, b) == 0; }

// Lexicographic compare_values over rows.
int compare_rows(const std::vector<Value>& a, const std::vector<Value>& b);

// Resolves a pattern variable to the node or edge it is bound to.
using VariableLookup = std::function<Value(const std::string&)>;

// Non-aggregate expression value. Absent properties yield Null.
Value eval_value(const PropertyGraph& graph, const Expr& expr, const VariableLookup& lookup,
                 const EvalOptions& options);

// Two-valued predicate: absent operands and (non-strict) mismatches are false.
bool eval_predicate(const PropertyGraph& graph, const Expr& expr, const VariableLookup& lookup,
                    const EvalOptions& options);

// Label and property-map constraints of a node pattern (variable ignored).
bool node_satisfies(const NodeRecord& node, const NodePattern& pattern);

// ORDER BY comparator for one key: nulls last in either direction.
int order_compare(const Value& a, const Value& b, bool descending);

}  // namespace hecix::cypher
