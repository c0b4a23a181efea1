#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "hecix/cypher/ast.hpp"
#include "hecix/graph/property_graph.hpp"

namespace hecix::cypher {

// Labels, relationship types and property keys actually present in a graph.
struct SchemaDescriptor {
  std::map<std::string, std::set<std::string>> node_keys;  // label -> keys
  std::map<std::string, std::set<std::string>> rel_keys;   // rel_type -> keys
  std::set<std::tuple<std::string, std::string, std::string>> triples;  // (src label, rel, dst label)

  static SchemaDescriptor of(const PropertyGraph& graph);
};

struct SchemaWarning {
  enum class Kind { UnknownLabel, UnknownRelType, UnknownProperty };
  Kind kind;
  std::string name;

  bool operator==(const SchemaWarning&) const = default;
};

std::string to_string(SchemaWarning::Kind kind);
std::string to_string(const SchemaWarning& warning);

// Names in the query that the schema does not know. Never throws; duplicates
// are reported once, in order of first appearance.
std::vector<SchemaWarning> validate(const QueryAst& ast, const SchemaDescriptor& schema);

// Text handed to the query-generation prompt:
//   Node labels:
//     Disease(ext_id, name)
//   Relationship types:
//     (:Disease)-[:ASSOCIATES_DaG]->(:Gene)
// Sections are sorted; a relationship with properties lists them after the triple.
std::string render_schema(const SchemaDescriptor& schema);
std::string render_schema(const PropertyGraph& graph);

}  // namespace hecix::cypher
