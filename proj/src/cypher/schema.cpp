#include "hecix/cypher/schema.hpp"

#include <algorithm>

namespace hecix::cypher {

SchemaDescriptor SchemaDescriptor::of(const PropertyGraph& graph) {
  SchemaDescriptor schema;
  for (const auto& n : graph.nodes()) {
    auto& keys = schema.node_keys[n.label];
    for (const auto& [k, v] : n.properties) keys.insert(k);
  }
  for (const auto& e : graph.edges()) {
    auto& keys = schema.rel_keys[e.rel_type];
    for (const auto& [k, v] : e.properties) keys.insert(k);
    schema.triples.emplace(graph.node(e.source).label, e.rel_type, graph.node(e.target).label);
  }
  return schema;
}

std::string to_string(SchemaWarning::Kind kind) {
  switch (kind) {
    case SchemaWarning::Kind::UnknownLabel: return "UnknownLabel";
    case SchemaWarning::Kind::UnknownRelType: return "UnknownRelType";
    case SchemaWarning::Kind::UnknownProperty: return "UnknownProperty";
  }
  return "Unknown";
}

std::string to_string(const SchemaWarning& warning) {
  return to_string(warning.kind) + "(" + warning.name + ")";
}

namespace {

class Checker {
public:
  Checker(const QueryAst& ast, const SchemaDescriptor& schema) : schema_(schema) {
    for (const auto& path : ast.match_patterns) {
      for (const auto& n : path.nodes) {
        if (n.label && n.variable) node_labels_[*n.variable].insert(*n.label);
      }
      for (const auto& r : path.rels) {
        if (r.variable) {
          rels_.insert(*r.variable);
          if (r.rel_type) rel_types_[*r.variable].insert(*r.rel_type);
        }
      }
    }
  }

  void pattern(const PathPattern& path) {
    for (const auto& n : path.nodes) {
      if (!n.label) continue;
      if (!schema_.node_keys.contains(*n.label)) {
        add(SchemaWarning::Kind::UnknownLabel, *n.label);
        continue;
      }
      for (const auto& [key, value] : n.properties) node_key(*n.label, key);
    }
    for (const auto& r : path.rels) {
      if (r.rel_type && !schema_.rel_keys.contains(*r.rel_type)) add(SchemaWarning::Kind::UnknownRelType, *r.rel_type);
    }
  }

  void expr(const Expr& e) {
    if (e.kind == Expr::Kind::Property) property(e.name, e.key);
    for (const auto& a : e.args) expr(a);
  }

  std::vector<SchemaWarning> take() { return std::move(warnings_); }

private:
  void add(SchemaWarning::Kind kind, const std::string& name) {
    SchemaWarning w{kind, name};
    if (std::find(warnings_.begin(), warnings_.end(), w) == warnings_.end()) warnings_.push_back(std::move(w));
  }

  void node_key(const std::string& label, const std::string& key) {
    const auto it = schema_.node_keys.find(label);
    if (it != schema_.node_keys.end() && !it->second.contains(key)) add(SchemaWarning::Kind::UnknownProperty, label + "." + key);
  }

  void property(const std::string& var, const std::string& key) {
    if (rels_.contains(var)) {
      const auto types = rel_types_.find(var);
      if (types != rel_types_.end()) {
        for (const auto& t : types->second) {
          const auto it = schema_.rel_keys.find(t);
          if (it != schema_.rel_keys.end() && !it->second.contains(key)) add(SchemaWarning::Kind::UnknownProperty, t + "." + key);
        }
        return;
      }
      for (const auto& [t, keys] : schema_.rel_keys) {
        if (keys.contains(key)) return;
      }
      add(SchemaWarning::Kind::UnknownProperty, key);
      return;
    }
    const auto labels = node_labels_.find(var);
    if (labels != node_labels_.end()) {
      for (const auto& l : labels->second) node_key(l, key);
      return;
    }
    for (const auto& [l, keys] : schema_.node_keys) {
      if (keys.contains(key)) return;
    }
    add(SchemaWarning::Kind::UnknownProperty, key);
  }

  const SchemaDescriptor& schema_;
  std::set<std::string> rels_;
  std::map<std::string, std::set<std::string>> node_labels_;
  std::map<std::string, std::set<std::string>> rel_types_;
  std::vector<SchemaWarning> warnings_;
};

std::string joined(const std::set<std::string>& keys) {
  std::string out;
  for (const auto& k : keys) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out;
}

}  // namespace

std::vector<SchemaWarning> validate(const QueryAst& ast, const SchemaDescriptor& schema) {
  Checker checker(ast, schema);
  for (const auto& p : ast.match_patterns) checker.pattern(p);
  if (ast.where_clause) checker.expr(*ast.where_clause);
  for (const auto& item : ast.return_items) checker.expr(item.expr);
  for (const auto& o : ast.order_by) checker.expr(o.expr);
  return checker.take();
}

std::string render_schema(const SchemaDescriptor& schema) {
  std::string out = "Node labels:\n";
  for (const auto& [label, keys] : schema.node_keys) out += "  " + label + "(" + joined(keys) + ")\n";
  out += "Relationship types:\n";
  for (const auto& [src, rel, dst] : schema.triples) {
    out += "  (:" + src + ")-[:" + rel + "]->(:" + dst + ")";
    const auto& keys = schema.rel_keys.at(rel);
    if (!keys.empty()) out += " {" + joined(keys) + "}";
    out += "\n";
  }
  return out;
}

std::string render_schema(const PropertyGraph& graph) { return render_schema(SchemaDescriptor::of(graph)); }

}  // namespace hecix::cypher
