#include "hecix/cypher/brute_force.hpp"

#include <optional>

#include "hecix/cypher/parser.hpp"
#include "hecix/errors.hpp"

namespace hecix::cypher {

namespace {

struct Element {
  bool is_node = true;
  const NodePattern* node = nullptr;
  const RelPattern* rel = nullptr;
  std::optional<std::string> variable;
};

// Position order: pattern 0 left to right (node, rel, node, ...), then
// pattern 1, and so on. Assignments are enumerated in that order with ids
// ascending, which is the canonical solution order.
class Enumerator {
public:
  Enumerator(const PropertyGraph& graph, const QueryAst& ast, const EvalOptions& options)
      : graph_(graph), ast_(ast), options_(options) {
    for (const auto& path : ast.match_patterns) {
      for (std::size_t i = 0; i < path.nodes.size(); ++i) {
        elements_.push_back({true, &path.nodes[i], nullptr, path.nodes[i].variable});
        if (i < path.rels.size()) elements_.push_back({false, nullptr, &path.rels[i], path.rels[i].variable});
      }
      pattern_ends_.push_back(elements_.size());
    }
    assignment_.assign(elements_.size(), 0);
  }

  std::vector<std::vector<std::uint64_t>> run() {
    assign(0);
    return solutions_;
  }

private:
  bool starts_pattern(std::size_t pos) const {
    if (pos == 0) return true;
    for (auto end : pattern_ends_) {
      if (end == pos) return true;
    }
    return false;
  }

  std::optional<std::uint64_t> earlier_binding(std::size_t pos) const {
    if (!elements_[pos].variable) return std::nullopt;
    for (std::size_t i = 0; i < pos; ++i) {
      if (elements_[i].variable == elements_[pos].variable && elements_[i].is_node == elements_[pos].is_node) {
        return assignment_[i];
      }
    }
    return std::nullopt;
  }

  bool edge_connects(const EdgeRecord& e, const RelPattern& rel, NodeId left, NodeId right) const {
    switch (rel.direction) {
      case RelDirection::Right: return e.source == left && e.target == right;
      case RelDirection::Left: return e.source == right && e.target == left;
      case RelDirection::Undirected:
        return (e.source == left && e.target == right) || (e.source == right && e.target == left);
    }
    return false;
  }

  void assign(std::size_t pos) {
    if (pos == elements_.size()) {
      if (ast_.where_clause) {
        VariableLookup lk = [this](const std::string& name) { return lookup(name); };
        if (!eval_predicate(graph_, *ast_.where_clause, lk, options_)) return;
      }
      solutions_.push_back(assignment_);
      return;
    }
    const Element& el = elements_[pos];
    const auto prior = earlier_binding(pos);
    if (el.is_node) {
      for (const auto& n : graph_.nodes()) {
        if (prior && *prior != n.id.value) continue;
        if (!node_satisfies(n, *el.node)) continue;
        if (!starts_pattern(pos)) {
          // The relationship before this node must join it to the previous node.
          const EdgeRecord& e = graph_.edge(EdgeId{assignment_[pos - 1]});
          if (!edge_connects(e, *elements_[pos - 1].rel, NodeId{assignment_[pos - 2]}, n.id)) continue;
        }
        assignment_[pos] = n.id.value;
        assign(pos + 1);
      }
      return;
    }
    const NodeId left{assignment_[pos - 1]};
    for (const auto& e : graph_.edges()) {
      if (prior && *prior != e.id.value) continue;
      if (el.rel->rel_type && e.rel_type != *el.rel->rel_type) continue;
      if (e.source != left && e.target != left) continue;
      bool reused = false;
      for (std::size_t i = 0; i < pos; ++i) {
        if (!elements_[i].is_node && assignment_[i] == e.id.value) reused = true;
      }
      if (reused) continue;
      assignment_[pos] = e.id.value;
      assign(pos + 1);
    }
  }

  Value lookup(const std::string& name) const {
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      if (elements_[i].variable != name) continue;
      if (elements_[i].is_node) return NodeRef{NodeId{assignment_[i]}};
      return EdgeRef{EdgeId{assignment_[i]}};
    }
    throw UnboundVariable(name);
  }

  const PropertyGraph& graph_;
  const QueryAst& ast_;
  const EvalOptions& options_;
  std::vector<Element> elements_;
  std::vector<std::size_t> pattern_ends_;
  std::vector<std::uint64_t> assignment_;
  std::vector<std::vector<std::uint64_t>> solutions_;

public:
  VariableLookup lookup_for(const std::vector<std::uint64_t>& assignment) const {
    return [this, &assignment](const std::string& name) -> Value {
      for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (elements_[i].variable != name) continue;
        if (elements_[i].is_node) return NodeRef{NodeId{assignment[i]}};
        return EdgeRef{EdgeId{assignment[i]}};
      }
      throw UnboundVariable(name);
    };
  }
};

struct Row {
  std::vector<Value> cells;
  std::optional<std::size_t> solution;
};

bool rows_equivalent(const std::vector<Value>& a, const std::vector<Value>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!equivalent(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

ResultTable brute_force_match(const PropertyGraph& graph, const QueryAst& ast, const EvalOptions& options) {
  if (graph.nodes().size() > kBruteForceNodeBound) throw SizeLimit(graph.nodes().size(), kBruteForceNodeBound);

  Enumerator enumerator(graph, ast, options);
  const auto solutions = enumerator.run();

  ResultTable table;
  for (const auto& item : ast.return_items) table.columns.push_back(column_name(item));

  std::vector<Row> rows;
  if (!ast.has_aggregation()) {
    for (std::size_t s = 0; s < solutions.size(); ++s) {
      Row row;
      row.solution = s;
      for (const auto& item : ast.return_items) {
        row.cells.push_back(eval_value(graph, item.expr, enumerator.lookup_for(solutions[s]), options));
      }
      rows.push_back(std::move(row));
    }
  } else {
    // Linear-scan grouping in first-appearance order.
    std::vector<std::vector<Value>> group_keys;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t s = 0; s < solutions.size(); ++s) {
      std::vector<Value> key;
      for (const auto& item : ast.return_items) {
        if (!item.expr.contains_aggregate()) {
          key.push_back(eval_value(graph, item.expr, enumerator.lookup_for(solutions[s]), options));
        }
      }
      std::size_t g = 0;
      while (g < group_keys.size() && !rows_equivalent(group_keys[g], key)) ++g;
      if (g == group_keys.size()) {
        group_keys.push_back(key);
        members.emplace_back();
      }
      members[g].push_back(s);
    }
    bool any_key = false;
    for (const auto& item : ast.return_items) any_key = any_key || !item.expr.contains_aggregate();
    if (group_keys.empty() && !any_key) {
      group_keys.emplace_back();
      members.emplace_back();
    }
    for (std::size_t g = 0; g < group_keys.size(); ++g) {
      Row row;
      std::size_t k = 0;
      for (const auto& item : ast.return_items) {
        const Expr& e = item.expr;
        if (!e.contains_aggregate()) {
          row.cells.push_back(group_keys[g][k++]);
          continue;
        }
        if (e.kind == Expr::Kind::CountStar) {
          row.cells.push_back(static_cast<std::int64_t>(members[g].size()));
          continue;
        }
        Value::List values;
        for (std::size_t s : members[g]) {
          Value v = eval_value(graph, e.args.at(0), enumerator.lookup_for(solutions[s]), options);
          if (!v.is_null()) values.push_back(std::move(v));
        }
        if (e.kind == Expr::Kind::Count) row.cells.push_back(static_cast<std::int64_t>(values.size()));
        else row.cells.push_back(std::move(values));
      }
      rows.push_back(std::move(row));
    }
  }

  if (ast.distinct) {
    std::vector<Row> kept;
    for (auto& r : rows) {
      bool dup = false;
      for (const auto& k : kept) dup = dup || rows_equivalent(k.cells, r.cells);
      if (!dup) kept.push_back(std::move(r));
    }
    rows = std::move(kept);
  }

  if (!ast.order_by.empty()) {
    auto sort_value = [&](const Row& r, std::size_t o) -> Value {
      const int col = resolve_order_column(ast, ast.order_by[o]);
      if (col >= 0) return r.cells[static_cast<std::size_t>(col)];
      if (!r.solution) throw EvalError("ORDER BY expression is not projected");
      return eval_value(graph, ast.order_by[o].expr, enumerator.lookup_for(solutions[*r.solution]), options);
    };
    auto before = [&](const Row& a, const Row& b) {
      for (std::size_t o = 0; o < ast.order_by.size(); ++o) {
        const int c = order_compare(sort_value(a, o), sort_value(b, o), ast.order_by[o].descending);
        if (c != 0) return c < 0;
      }
      return false;
    };
    // Insertion sort: stable by construction.
    for (std::size_t i = 1; i < rows.size(); ++i) {
      std::size_t j = i;
      while (j > 0 && before(rows[i], rows[j - 1])) --j;
      if (j != i) {
        Row moving = std::move(rows[i]);
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(i));
        rows.insert(rows.begin() + static_cast<std::ptrdiff_t>(j), std::move(moving));
      }
    }
  }

  std::size_t index = 0;
  std::size_t emitted = 0;
  for (auto& r : rows) {
    if (ast.skip && index++ < static_cast<std::size_t>(*ast.skip)) continue;
    if (ast.limit && emitted >= static_cast<std::size_t>(*ast.limit)) break;
    table.rows.push_back(std::move(r.cells));
    ++emitted;
  }
  return table;
}

}  // namespace hecix::cypher
