#include "hecix/cypher/result_table.hpp"

#include <algorithm>

#include "hecix/cypher/render.hpp"
#include "hecix/cypher/semantics.hpp"

namespace hecix::cypher {

namespace {

std::string props_text(const PropertyMap& props) {
  if (props.empty()) return {};
  std::string out = " {";
  bool first = true;
  for (const auto& [key, value] : props) {
    if (!first) out += ", ";
    first = false;
    out += quote_name(key);
    out += ": ";
    out += render_literal(value);
  }
  out += "}";
  return out;
}

}  // namespace

std::string cell_text(const PropertyGraph& graph, const Value& value) {
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Null>) {
          return "null";
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, NodeRef>) {
          const auto* n = graph.find_node(v.id);
          if (!n) return "(" + to_string(v.id) + ")";
          return "(" + to_string(v.id) + ":" + quote_name(n->label) + props_text(n->properties) + ")";
        } else if constexpr (std::is_same_v<T, EdgeRef>) {
          const auto& e = graph.edge(v.id);
          return "[" + to_string(v.id) + ":" + quote_name(e.rel_type) + props_text(e.properties) + "]";
        } else {
          std::string out = "[";
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ", ";
            out += cell_text(graph, v[i]);
          }
          return out + "]";
        }
      },
      value.data);
}

std::vector<std::vector<Value>> sorted_rows(const ResultTable& table) {
  auto rows = table.rows;
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return compare_rows(a, b) < 0; });
  return rows;
}

bool same_row_multiset(const ResultTable& a, const ResultTable& b) {
  if (a.columns != b.columns || a.rows.size() != b.rows.size()) return false;
  const auto ra = sorted_rows(a);
  const auto rb = sorted_rows(b);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    if (compare_rows(ra[i], rb[i]) != 0) return false;
  }
  return true;
}

}  // namespace hecix::cypher
