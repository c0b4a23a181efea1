#pragma once

#include <string>
#include <vector>

#include "hecix/graph/property_graph.hpp"
#include "hecix/graph/value.hpp"

namespace hecix::cypher {

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;

  bool operator==(const ResultTable&) const = default;
};

// Text for one cell. Nodes render as `(n3:Gene {name: 'TYR'})`, lists as
// `[a, b]`, the absent marker as `null`.
std::string cell_text(const PropertyGraph& graph, const Value& value);

// Rows sorted under compare_values; used to compare tables as multisets.
std::vector<std::vector<Value>> sorted_rows(const ResultTable& table);
bool same_row_multiset(const ResultTable& a, const ResultTable& b);

}  // namespace hecix::cypher
