#include "hecix/cypher/semantics.hpp"

#include <cctype>

#include "hecix/errors.hpp"

namespace hecix::cypher {

namespace {

int type_rank(const Value& v) {
  switch (v.data.index()) {
    case 2:  // int
    case 3:  // double
      return 0;
    case 4: return 1;  // string
    case 1: return 2;  // bool
    case 5: return 3;  // node
    case 6: return 4;  // edge
    case 7: return 5;  // list
    default: return 6;  // null
  }
}

long double as_long_double(const Value& v) {
  if (const auto* i = v.get_if<std::int64_t>()) return static_cast<long double>(*i);
  return static_cast<long double>(*v.get_if<double>());
}

template <typename T>
int three_way(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

[[noreturn]] void mismatch(const char* op, const Value& a, const Value& b) {
  throw EvalError(std::string("type mismatch in ") + op + " between rank " +
                  std::to_string(type_rank(a)) + " and rank " + std::to_string(type_rank(b)));
}

bool comparable_kinds(const Value& a, const Value& b) {
  const int ra = type_rank(a);
  const int rb = type_rank(b);
  return ra == rb && ra <= 4;
}

bool orderable_kinds(const Value& a, const Value& b) {
  const int ra = type_rank(a);
  const int rb = type_rank(b);
  return ra == rb && ra <= 2;
}

bool compare_predicate(CompareOp op, const Value& a, const Value& b, const EvalOptions& options) {
  if (a.is_null() || b.is_null()) return false;
  if (op == CompareOp::Eq || op == CompareOp::Neq) {
    if (!comparable_kinds(a, b)) {
      if (options.strict) mismatch(op == CompareOp::Eq ? "=" : "<>", a, b);
      return false;
    }
    const bool eq = compare_values(a, b) == 0;
    return op == CompareOp::Eq ? eq : !eq;
  }
  if (!orderable_kinds(a, b)) {
    if (options.strict) mismatch("ordering comparison", a, b);
    return false;
  }
  const int c = compare_values(a, b);
  switch (op) {
    case CompareOp::Lt: return c < 0;
    case CompareOp::Le: return c <= 0;
    case CompareOp::Gt: return c > 0;
    case CompareOp::Ge: return c >= 0;
    default: return false;
  }
}

bool text_predicate(StringOp op, const Value& a, const Value& b, const EvalOptions& options) {
  if (a.is_null() || b.is_null()) return false;
  const auto* s = a.get_if<std::string>();
  const auto* t = b.get_if<std::string>();
  if (!s || !t) {
    if (options.strict) mismatch("string operator", a, b);
    return false;
  }
  switch (op) {
    case StringOp::Contains: return s->find(*t) != std::string::npos;
    case StringOp::StartsWith: return s->starts_with(*t);
    case StringOp::EndsWith: return s->ends_with(*t);
  }
  return false;
}

}  // namespace

int compare_values(const Value& a, const Value& b) {
  const int ra = type_rank(a);
  const int rb = type_rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (ra) {
    case 0: {
      const auto* ai = a.get_if<std::int64_t>();
      const auto* bi = b.get_if<std::int64_t>();
      if (ai && bi) return three_way(*ai, *bi);
      return three_way(as_long_double(a), as_long_double(b));
    }
    case 1: return three_way(*a.get_if<std::string>(), *b.get_if<std::string>());
    case 2: return three_way(*a.get_if<bool>(), *b.get_if<bool>());
    case 3: return three_way(a.get_if<NodeRef>()->id, b.get_if<NodeRef>()->id);
    case 4: return three_way(a.get_if<EdgeRef>()->id, b.get_if<EdgeRef>()->id);
    case 5: {
      const auto& la = *a.get_if<Value::List>();
      const auto& lb = *b.get_if<Value::List>();
      return compare_rows(la, lb);
    }
    default: return 0;
  }
}

int compare_rows(const std::vector<Value>& a, const std::vector<Value>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare_values(a[i], b[i]); c != 0) return c;
  }
  return three_way(a.size(), b.size());
}

int order_compare(const Value& a, const Value& b, bool descending) {
  const bool an = a.is_null();
  const bool bn = b.is_null();
  if (an || bn) return an == bn ? 0 : (an ? 1 : -1);
  const int c = compare_values(a, b);
  return descending ? -c : c;
}

Value eval_value(const PropertyGraph& graph, const Expr& expr, const VariableLookup& lookup,
                 const EvalOptions& options) {
  switch (expr.kind) {
    case Expr::Kind::Variable:
      return lookup(expr.name);
    case Expr::Kind::Property: {
      const Value target = lookup(expr.name);
      const PropertyMap* props = nullptr;
      if (const auto* n = target.get_if<NodeRef>()) {
        props = &graph.node(n->id).properties;
      } else if (const auto* e = target.get_if<EdgeRef>()) {
        props = &graph.edge(e->id).properties;
      }
      if (!props) return Null{};
      auto it = props->find(expr.key);
      return it == props->end() ? Value(Null{}) : Value::from_scalar(it->second);
    }
    case Expr::Kind::Literal:
      return Value::from_scalar(expr.literal);
    case Expr::Kind::ToLower: {
      Value v = eval_value(graph, expr.args.at(0), lookup, options);
      auto* s = std::get_if<std::string>(&v.data);
      if (!s) return Null{};
      for (auto& c : *s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return v;
    }
    case Expr::Kind::Compare:
    case Expr::Kind::Text:
    case Expr::Kind::And:
    case Expr::Kind::Or:
    case Expr::Kind::Not:
      return eval_predicate(graph, expr, lookup, options);
    case Expr::Kind::CountStar:
    case Expr::Kind::Count:
    case Expr::Kind::Collect:
      throw EvalError("aggregate used outside of a projection");
  }
  return Null{};
}

bool eval_predicate(const PropertyGraph& graph, const Expr& expr, const VariableLookup& lookup,
                    const EvalOptions& options) {
  switch (expr.kind) {
    case Expr::Kind::And:
      return eval_predicate(graph, expr.args.at(0), lookup, options) &&
             eval_predicate(graph, expr.args.at(1), lookup, options);
    case Expr::Kind::Or:
      return eval_predicate(graph, expr.args.at(0), lookup, options) ||
             eval_predicate(graph, expr.args.at(1), lookup, options);
    case Expr::Kind::Not:
      return !eval_predicate(graph, expr.args.at(0), lookup, options);
    case Expr::Kind::Compare:
      return compare_predicate(expr.compare, eval_value(graph, expr.args.at(0), lookup, options),
                               eval_value(graph, expr.args.at(1), lookup, options), options);
    case Expr::Kind::Text:
      return text_predicate(expr.text_op, eval_value(graph, expr.args.at(0), lookup, options),
                            eval_value(graph, expr.args.at(1), lookup, options), options);
    default: {
      const Value v = eval_value(graph, expr, lookup, options);
      const auto* b = v.get_if<bool>();
      return b && *b;
    }
  }
}

bool node_satisfies(const NodeRecord& node, const NodePattern& pattern) {
  if (pattern.label && node.label != *pattern.label) return false;
  for (const auto& [key, value] : pattern.properties) {
    auto it = node.properties.find(key);
    if (it == node.properties.end() || !scalars_equal(it->second, value)) return false;
  }
  return true;
}

}  // namespace hecix::cypher
