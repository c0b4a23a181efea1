#pragma once

#include <cstddef>

#include "hecix/cypher/ast.hpp"
#include "hecix/cypher/result_table.hpp"
#include "hecix/cypher/semantics.hpp"
#include "hecix/graph/property_graph.hpp"

namespace hecix::cypher {

inline constexpr std::size_t kBruteForceNodeBound = 50;

// Serial reference implementation of evaluate(). Enumerates every node and
// edge assignment for the pattern elements in order, without indexes or
// adjacency lists, and projects with naive linear-scan grouping and an
// insertion sort. Throws SizeLimit above kBruteForceNodeBound nodes.
ResultTable brute_force_match(const PropertyGraph& graph, const QueryAst& ast,
                              const EvalOptions& options = {});

}  // namespace hecix::cypher
