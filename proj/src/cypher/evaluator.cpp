#include "hecix/cypher/evaluator.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <set>

#include <omp.h>

#include "hecix/cypher/parser.hpp"
#include "hecix/cypher/render.hpp"
#include "hecix/errors.hpp"

namespace hecix::cypher {

namespace {

using Key = std::vector<std::uint64_t>;

struct Slot {
  bool is_node = true;
  std::size_t index = 0;
};

struct Step {
  enum class Kind { Start, Expand } kind = Kind::Start;
  const NodePattern* node = nullptr;  // node bound by this step
  const RelPattern* rel = nullptr;    // Expand only
  std::size_t node_slot = 0;
  std::size_t node_position = 0;
  std::size_t from_slot = 0;      // Expand: already-bound node
  std::size_t edge_slot = 0;
  std::size_t edge_position = 0;
  bool outgoing = true;           // Expand: follow out-edges (true) or in-edges
  bool undirected = false;
  std::vector<NodeId> candidates; // Start on an unbound slot
  bool prebound = false;          // Start on a slot bound by an earlier pattern
};

struct Plan {
  std::size_t node_slots = 0;
  std::size_t edge_slots = 0;
  std::size_t positions = 0;
  std::map<std::string, Slot> variables;
  std::vector<Step> steps;
};

std::vector<NodeId> seed_candidates(const PropertyGraph& graph, const NodePattern& node) {
  if (node.label) {
    for (const auto& [key, value] : node.properties) {
      if (PropertyGraph::is_indexed_key(key)) {
        return graph.find_nodes(*node.label, std::pair{key, value});
      }
    }
    return graph.nodes_with_label(*node.label);
  }
  std::vector<NodeId> all;
  all.reserve(graph.nodes().size());
  for (const auto& n : graph.nodes()) all.push_back(n.id);
  return all;
}

Plan build_plan(const PropertyGraph& graph, const QueryAst& ast) {
  Plan plan;
  std::vector<std::vector<std::size_t>> node_slot_of(ast.match_patterns.size());
  std::vector<std::vector<std::size_t>> edge_slot_of(ast.match_patterns.size());
  std::vector<std::size_t> offsets;

  for (std::size_t p = 0; p < ast.match_patterns.size(); ++p) {
    const auto& path = ast.match_patterns[p];
    offsets.push_back(plan.positions);
    plan.positions += path.nodes.size() + path.rels.size();
    for (const auto& n : path.nodes) {
      std::size_t slot;
      if (n.variable) {
        auto [it, inserted] = plan.variables.emplace(*n.variable, Slot{true, plan.node_slots});
        if (inserted) ++plan.node_slots;
        slot = it->second.index;
      } else {
        slot = plan.node_slots++;
      }
      node_slot_of[p].push_back(slot);
    }
    for (const auto& r : path.rels) {
      std::size_t slot;
      if (r.variable) {
        auto [it, inserted] = plan.variables.emplace(*r.variable, Slot{false, plan.edge_slots});
        if (inserted) ++plan.edge_slots;
        slot = it->second.index;
      } else {
        slot = plan.edge_slots++;
      }
      edge_slot_of[p].push_back(slot);
    }
  }

  std::set<std::size_t> bound_slots;
  for (std::size_t p = 0; p < ast.match_patterns.size(); ++p) {
    const auto& path = ast.match_patterns[p];
    const std::size_t k = path.rels.size();
    auto node_pos = [&](std::size_t i) { return offsets[p] + 2 * i; };
    auto edge_pos = [&](std::size_t i) { return offsets[p] + 2 * i + 1; };

    std::optional<std::size_t> start;
    for (std::size_t i = 0; i <= k; ++i) {
      if (bound_slots.contains(node_slot_of[p][i])) {
        start = i;
        break;
      }
    }
    Step first;
    first.kind = Step::Kind::Start;
    if (start) {
      first.prebound = true;
    } else {
      std::size_t best = 0;
      std::vector<NodeId> best_candidates = seed_candidates(graph, path.nodes[0]);
      for (std::size_t i = 1; i <= k; ++i) {
        auto c = seed_candidates(graph, path.nodes[i]);
        if (c.size() < best_candidates.size()) {
          best = i;
          best_candidates = std::move(c);
        }
      }
      start = best;
      first.candidates = std::move(best_candidates);
    }
    first.node = &path.nodes[*start];
    first.node_slot = node_slot_of[p][*start];
    first.node_position = node_pos(*start);
    plan.steps.push_back(std::move(first));

    auto expand = [&](std::size_t rel_index, std::size_t from, std::size_t to) {
      const RelPattern& rel = path.rels[rel_index];
      Step s;
      s.kind = Step::Kind::Expand;
      s.rel = &rel;
      s.node = &path.nodes[to];
      s.node_slot = node_slot_of[p][to];
      s.node_position = node_pos(to);
      s.from_slot = node_slot_of[p][from];
      s.edge_slot = edge_slot_of[p][rel_index];
      s.edge_position = edge_pos(rel_index);
      const bool forward = to > from;
      s.undirected = rel.direction == RelDirection::Undirected;
      s.outgoing = (rel.direction == RelDirection::Right) == forward;
      plan.steps.push_back(std::move(s));
    };
    for (std::size_t i = *start; i < k; ++i) expand(i, i, i + 1);
    for (std::size_t i = *start; i > 0; --i) expand(i - 1, i, i - 1);

    for (auto s : node_slot_of[p]) bound_slots.insert(s);
  }
  return plan;
}

class Matcher {
public:
  Matcher(const PropertyGraph& graph, const QueryAst& ast, const Plan& plan,
          const EvalOptions& options)
      : graph_(graph), ast_(ast), plan_(plan), options_(options) {
    nodes_.assign(plan.node_slots, kUnbound);
    edges_.assign(plan.edge_slots, kUnbound);
    key_.assign(plan.positions, 0);
  }

  // Runs the search with the first step pinned to one seed.
  void run_from_seed(NodeId seed, std::vector<Key>& out) {
    const Step& s = plan_.steps.front();
    const NodeRecord& n = graph_.node(seed);
    if (!node_satisfies(n, *s.node)) return;
    nodes_[s.node_slot] = seed.value;
    key_[s.node_position] = seed.value;
    search(1, out);
    nodes_[s.node_slot] = kUnbound;
  }

  Value lookup(const std::string& name) const {
    auto it = plan_.variables.find(name);
    if (it == plan_.variables.end()) throw UnboundVariable(name);
    if (it->second.is_node) return NodeRef{NodeId{nodes_[it->second.index]}};
    return EdgeRef{EdgeId{edges_[it->second.index]}};
  }

private:
  static constexpr std::uint64_t kUnbound = ~std::uint64_t{0};

  void search(std::size_t step_index, std::vector<Key>& out) {
    if (step_index == plan_.steps.size()) {
      if (ast_.where_clause) {
        VariableLookup lk = [this](const std::string& v) { return lookup(v); };
        if (!eval_predicate(graph_, *ast_.where_clause, lk, options_)) return;
      }
      out.push_back(key_);
      return;
    }
    const Step& s = plan_.steps[step_index];
    if (s.kind == Step::Kind::Start) {
      if (s.prebound) {
        key_[s.node_position] = nodes_[s.node_slot];
        if (node_satisfies(graph_.node(NodeId{nodes_[s.node_slot]}), *s.node)) search(step_index + 1, out);
        return;
      }
      for (NodeId c : s.candidates) {
        if (!node_satisfies(graph_.node(c), *s.node)) continue;
        nodes_[s.node_slot] = c.value;
        key_[s.node_position] = c.value;
        search(step_index + 1, out);
      }
      nodes_[s.node_slot] = kUnbound;
      return;
    }

    const NodeId from{nodes_[s.from_slot]};
    auto try_edge = [&](EdgeId eid, NodeId next) {
      const EdgeRecord& e = graph_.edge(eid);
      if (s.rel->rel_type && e.rel_type != *s.rel->rel_type) return;
      if (std::find(used_.begin(), used_.end(), eid.value) != used_.end()) return;
      const bool edge_was_bound = edges_[s.edge_slot] != kUnbound;
      if (edge_was_bound && edges_[s.edge_slot] != eid.value) return;
      const bool node_was_bound = nodes_[s.node_slot] != kUnbound;
      if (node_was_bound) {
        if (nodes_[s.node_slot] != next.value) return;
        if (!node_satisfies(graph_.node(next), *s.node)) return;
      } else {
        if (!node_satisfies(graph_.node(next), *s.node)) return;
        nodes_[s.node_slot] = next.value;
      }
      edges_[s.edge_slot] = eid.value;
      used_.push_back(eid.value);
      key_[s.edge_position] = eid.value;
      key_[s.node_position] = next.value;
      search(step_index + 1, out);
      used_.pop_back();
      if (!edge_was_bound) edges_[s.edge_slot] = kUnbound;
      if (!node_was_bound) nodes_[s.node_slot] = kUnbound;
    };

    if (s.undirected) {
      for (EdgeId e : graph_.out_edges(from)) try_edge(e, graph_.edge(e).target);
      for (EdgeId e : graph_.in_edges(from)) {
        const auto& rec = graph_.edge(e);
        if (rec.source == rec.target) continue;  // already seen as outgoing
        try_edge(e, rec.source);
      }
    } else if (s.outgoing) {
      for (EdgeId e : graph_.out_edges(from)) try_edge(e, graph_.edge(e).target);
    } else {
      for (EdgeId e : graph_.in_edges(from)) try_edge(e, graph_.edge(e).source);
    }
  }

  const PropertyGraph& graph_;
  const QueryAst& ast_;
  const Plan& plan_;
  const EvalOptions& options_;
  std::vector<std::uint64_t> nodes_;
  std::vector<std::uint64_t> edges_;
  std::vector<std::uint64_t> used_;
  Key key_;
};

struct RowLess {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
    return compare_rows(a, b) < 0;
  }
};

// Maps canonical solution keys back to variable bindings.
class KeyLookup {
public:
  KeyLookup(const QueryAst& ast) {
    std::size_t pos = 0;
    for (const auto& path : ast.match_patterns) {
      for (std::size_t i = 0; i < path.nodes.size(); ++i) {
        if (path.nodes[i].variable) first_.try_emplace(*path.nodes[i].variable, Slot{true, pos + 2 * i});
        if (i < path.rels.size() && path.rels[i].variable) {
          first_.try_emplace(*path.rels[i].variable, Slot{false, pos + 2 * i + 1});
        }
      }
      pos += path.nodes.size() + path.rels.size();
    }
  }

  VariableLookup bind(const Key& key) const {
    return [this, &key](const std::string& name) -> Value {
      auto it = first_.find(name);
      if (it == first_.end()) throw UnboundVariable(name);
      const std::uint64_t v = key[it->second.index];
      if (it->second.is_node) return NodeRef{NodeId{v}};
      return EdgeRef{EdgeId{v}};
    };
  }

private:
  std::map<std::string, Slot> first_;
};

struct OutRow {
  std::vector<Value> cells;
  const Key* binding = nullptr;
};

}  // namespace

ResultTable evaluate(const PropertyGraph& graph, const QueryAst& ast, const EvalOptions& options) {
  if (ast.match_patterns.empty() || ast.return_items.empty()) {
    throw ParseError("MATCH and RETURN", "incomplete query", 0);
  }
  const Plan plan = build_plan(graph, ast);

  // ---- matching -----------------------------------------------------------
  const auto& seeds = plan.steps.front().candidates;
  std::vector<std::vector<Key>> per_seed(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
  const long long seed_count = static_cast<long long>(seeds.size());

#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
  for (long long i = 0; i < seed_count; ++i) {
    try {
      Matcher matcher(graph, ast, plan, options);
      matcher.run_from_seed(seeds[static_cast<std::size_t>(i)], per_seed[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<Key> solutions;
  for (auto& chunk : per_seed) {
    solutions.insert(solutions.end(), std::make_move_iterator(chunk.begin()),
                     std::make_move_iterator(chunk.end()));
  }
  std::sort(solutions.begin(), solutions.end());

  // ---- projection ---------------------------------------------------------
  const KeyLookup keys(ast);
  ResultTable table;
  for (const auto& item : ast.return_items) table.columns.push_back(column_name(item));

  std::vector<OutRow> rows;
  if (!ast.has_aggregation()) {
    rows.reserve(solutions.size());
    for (const auto& sol : solutions) {
      const auto lk = keys.bind(sol);
      OutRow row;
      row.binding = &sol;
      for (const auto& item : ast.return_items) row.cells.push_back(eval_value(graph, item.expr, lk, options));
      rows.push_back(std::move(row));
    }
  } else {
    struct Group {
      std::vector<Value> grouping;
      std::vector<const Key*> members;
    };
    std::vector<Group> groups;
    std::map<std::vector<Value>, std::size_t, RowLess> group_index;
    for (const auto& sol : solutions) {
      const auto lk = keys.bind(sol);
      std::vector<Value> grouping;
      for (const auto& item : ast.return_items) {
        if (!item.expr.contains_aggregate()) grouping.push_back(eval_value(graph, item.expr, lk, options));
      }
      auto [it, inserted] = group_index.try_emplace(grouping, groups.size());
      if (inserted) groups.push_back({std::move(grouping), {}});
      groups[it->second].members.push_back(&sol);
    }
    const bool has_keys = std::any_of(ast.return_items.begin(), ast.return_items.end(),
                                      [](const ReturnItem& i) { return !i.expr.contains_aggregate(); });
    if (groups.empty() && !has_keys) groups.push_back({});

    for (const auto& g : groups) {
      OutRow row;
      std::size_t next_key = 0;
      for (const auto& item : ast.return_items) {
        const Expr& e = item.expr;
        if (!e.contains_aggregate()) {
          row.cells.push_back(g.grouping[next_key++]);
        } else if (e.kind == Expr::Kind::CountStar) {
          row.cells.push_back(static_cast<std::int64_t>(g.members.size()));
        } else {
          std::int64_t count = 0;
          Value::List collected;
          for (const Key* m : g.members) {
            Value v = eval_value(graph, e.args.at(0), keys.bind(*m), options);
            if (v.is_null()) continue;
            ++count;
            if (e.kind == Expr::Kind::Collect) collected.push_back(std::move(v));
          }
          if (e.kind == Expr::Kind::Count) row.cells.push_back(count);
          else row.cells.push_back(std::move(collected));
        }
      }
      rows.push_back(std::move(row));
    }
  }

  if (ast.distinct) {
    std::set<std::vector<Value>, RowLess> seen;
    std::vector<OutRow> unique;
    for (auto& r : rows) {
      if (seen.insert(r.cells).second) unique.push_back(std::move(r));
    }
    rows = std::move(unique);
  }

  if (!ast.order_by.empty()) {
    std::vector<int> columns;
    for (const auto& o : ast.order_by) columns.push_back(resolve_order_column(ast, o));
    std::vector<std::pair<std::vector<Value>, std::size_t>> sort_keys;
    sort_keys.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::vector<Value> k;
      for (std::size_t o = 0; o < ast.order_by.size(); ++o) {
        if (columns[o] >= 0) {
          k.push_back(rows[r].cells[static_cast<std::size_t>(columns[o])]);
        } else {
          if (!rows[r].binding) throw EvalError("ORDER BY expression is not projected: " + render(ast.order_by[o].expr));
          k.push_back(eval_value(graph, ast.order_by[o].expr, keys.bind(*rows[r].binding), options));
        }
      }
      sort_keys.emplace_back(std::move(k), r);
    }
    std::stable_sort(sort_keys.begin(), sort_keys.end(), [&](const auto& a, const auto& b) {
      for (std::size_t o = 0; o < ast.order_by.size(); ++o) {
        const int c = order_compare(a.first[o], b.first[o], ast.order_by[o].descending);
        if (c != 0) return c < 0;
      }
      return false;
    });
    std::vector<OutRow> ordered;
    ordered.reserve(rows.size());
    for (const auto& [_, r] : sort_keys) ordered.push_back(std::move(rows[r]));
    rows = std::move(ordered);
  }

  const std::size_t skip = static_cast<std::size_t>(ast.skip.value_or(0));
  const std::size_t begin = std::min(skip, rows.size());
  std::size_t end = rows.size();
  if (ast.limit) end = std::min(end, begin + static_cast<std::size_t>(*ast.limit));
  for (std::size_t r = begin; r < end; ++r) table.rows.push_back(std::move(rows[r].cells));
  return table;
}

}  // namespace hecix::cypher
