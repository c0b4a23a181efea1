#pragma once

#include "hecix/cypher/ast.hpp"
#include "hecix/cypher/result_table.hpp"
#include "hecix/cypher/semantics.hpp"
#include "hecix/graph/property_graph.hpp"

namespace hecix::cypher {

// Pattern matching seeded from the most selective node pattern (index
// lookup when a label and an indexed property are given), expanded along
// adjacency lists. Seeds of the first pattern are matched in parallel with
// OpenMP; solutions are then put in canonical order (pattern elements left
// to right, ids ascending) so output never depends on the schedule.
//
// Relationship uniqueness holds across all comma-separated patterns.
// The graph is only read.
ResultTable evaluate(const PropertyGraph& graph, const QueryAst& ast, const EvalOptions& options = {});

}  // namespace hecix::cypher
