#include "hecix/graph/property_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hecix/errors.hpp"

namespace hecix {

namespace {

const std::vector<NodeId> kNoNodes;
const std::vector<EdgeId> kNoEdges;

// Numeric values that are integral collapse onto the integer encoding so
// that 3 and 3.0 share an index bucket, matching scalars_equal().
std::string encode_for_index(const Scalar& value) {
  if (const auto* d = std::get_if<double>(&value)) {
    if (std::isfinite(*d) && std::trunc(*d) == *d && std::abs(*d) < 9.2e18) {
      return "i:" + std::to_string(static_cast<std::int64_t>(*d));
    }
    return "f:" + format_double(*d);
  }
  if (const auto* i = std::get_if<std::int64_t>(&value)) return "i:" + std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&value)) return *b ? "b:1" : "b:0";
  return "s:" + std::get<std::string>(value);
}

void insert_id_sorted(std::vector<NodeId>& ids, NodeId id) {
  ids.insert(std::lower_bound(ids.begin(), ids.end(), id), id);
}

void insert_id_sorted(std::vector<EdgeId>& ids, EdgeId id) {
  ids.insert(std::lower_bound(ids.begin(), ids.end(), id), id);
}

}  // namespace

bool scalars_equal(const Scalar& a, const Scalar& b) {
  const auto* ai = std::get_if<std::int64_t>(&a);
  const auto* ad = std::get_if<double>(&a);
  const auto* bi = std::get_if<std::int64_t>(&b);
  const auto* bd = std::get_if<double>(&b);
  if ((ai || ad) && (bi || bd)) {
    if (ai && bi) return *ai == *bi;
    if (ad && bd) return *ad == *bd;
    const double d = ad ? *ad : *bd;
    const std::int64_t i = ai ? *ai : *bi;
    if (!std::isfinite(d) || std::trunc(d) != d || std::abs(d) >= 9.2e18) return false;
    return static_cast<std::int64_t>(d) == i;
  }
  return a == b;
}

bool PropertyGraph::is_indexed_key(std::string_view key) {
  return std::find(std::begin(kIndexedKeys), std::end(kIndexedKeys), key) != std::end(kIndexedKeys);
}

std::string PropertyGraph::index_key(std::string_view label, std::string_view key,
                                     const Scalar& value) {
  std::string out;
  out.reserve(label.size() + key.size() + 16);
  out.append(label);
  out.push_back('\0');
  out.append(key);
  out.push_back('\0');
  out += encode_for_index(value);
  return out;
}

void PropertyGraph::index_node_property(const NodeRecord& node, const std::string& key,
                                        const Scalar& value) {
  if (!is_indexed_key(key)) return;
  insert_id_sorted(prop_index_[index_key(node.label, key, value)], node.id);
}

void PropertyGraph::unindex_node_property(const NodeRecord& node, const std::string& key,
                                          const Scalar& value) {
  if (!is_indexed_key(key)) return;
  auto it = prop_index_.find(index_key(node.label, key, value));
  if (it == prop_index_.end()) return;
  auto& ids = it->second;
  auto pos = std::lower_bound(ids.begin(), ids.end(), node.id);
  if (pos != ids.end() && *pos == node.id) ids.erase(pos);
  if (ids.empty()) prop_index_.erase(it);
}

NodeId PropertyGraph::add_node(std::string label, PropertyMap properties,
                               std::optional<NodeId> explicit_id) {
  if (label.empty()) throw EmptyLabel();
  for (const auto& [key, _] : properties) {
    if (key.empty()) throw EmptyLabel("property key must be non-empty");
  }
  NodeId id = explicit_id.value_or(NodeId{next_node_});
  if (node_slot_.contains(id.value)) throw IdCollision(to_string(id));
  next_node_ = std::max(next_node_, id.value + 1);

  NodeRecord record{id, std::move(label), std::move(properties)};
  if (nodes_.empty() || nodes_.back().id < id) {
    node_slot_[id.value] = nodes_.size();
    nodes_.push_back(std::move(record));
  } else {
    auto pos = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                                [](const NodeRecord& n, NodeId v) { return n.id < v; });
    nodes_.insert(pos, std::move(record));
    for (std::size_t i = 0; i < nodes_.size(); ++i) node_slot_[nodes_[i].id.value] = i;
  }

  const NodeRecord& stored = nodes_[node_slot_.at(id.value)];
  insert_id_sorted(label_index_[stored.label], id);
  for (const auto& [key, value] : stored.properties) index_node_property(stored, key, value);
  return id;
}

EdgeId PropertyGraph::add_edge(std::string rel_type, NodeId source, NodeId target,
                               PropertyMap properties, std::optional<EdgeId> explicit_id) {
  if (rel_type.empty()) throw EmptyLabel("relationship type must be non-empty");
  if (!has_node(source)) throw DanglingEndpoint(to_string(source));
  if (!has_node(target)) throw DanglingEndpoint(to_string(target));
  EdgeId id = explicit_id.value_or(EdgeId{next_edge_});
  if (edge_slot_.contains(id.value)) throw IdCollision(to_string(id));
  next_edge_ = std::max(next_edge_, id.value + 1);

  EdgeRecord record{id, std::move(rel_type), source, target, std::move(properties)};
  if (edges_.empty() || edges_.back().id < id) {
    edge_slot_[id.value] = edges_.size();
    edges_.push_back(std::move(record));
  } else {
    auto pos = std::lower_bound(edges_.begin(), edges_.end(), id,
                                [](const EdgeRecord& e, EdgeId v) { return e.id < v; });
    edges_.insert(pos, std::move(record));
    for (std::size_t i = 0; i < edges_.size(); ++i) edge_slot_[edges_[i].id.value] = i;
  }
  insert_id_sorted(out_[source.value], id);
  insert_id_sorted(in_[target.value], id);
  return id;
}

void PropertyGraph::set_node_property(NodeId id, const std::string& key, Scalar value) {
  if (key.empty()) throw EmptyLabel("property key must be non-empty");
  auto slot = node_slot_.find(id.value);
  if (slot == node_slot_.end()) throw NotFound(to_string(id));
  NodeRecord& node = nodes_[slot->second];
  if (auto it = node.properties.find(key); it != node.properties.end()) {
    unindex_node_property(node, key, it->second);
  }
  node.properties[key] = value;
  index_node_property(node, key, value);
}

const NodeRecord& PropertyGraph::node(NodeId id) const {
  auto it = node_slot_.find(id.value);
  if (it == node_slot_.end()) throw NotFound(to_string(id));
  return nodes_[it->second];
}

const NodeRecord* PropertyGraph::find_node(NodeId id) const {
  auto it = node_slot_.find(id.value);
  return it == node_slot_.end() ? nullptr : &nodes_[it->second];
}

const EdgeRecord& PropertyGraph::edge(EdgeId id) const {
  auto it = edge_slot_.find(id.value);
  if (it == edge_slot_.end()) throw NotFound(to_string(id));
  return edges_[it->second];
}

std::span<const EdgeId> PropertyGraph::out_edges(NodeId id) const {
  auto it = out_.find(id.value);
  return it == out_.end() ? std::span<const EdgeId>(kNoEdges) : std::span<const EdgeId>(it->second);
}

std::span<const EdgeId> PropertyGraph::in_edges(NodeId id) const {
  auto it = in_.find(id.value);
  return it == in_.end() ? std::span<const EdgeId>(kNoEdges) : std::span<const EdgeId>(it->second);
}

std::set<NodeId> PropertyGraph::neighbors(NodeId id, Direction direction,
                                          std::optional<std::string_view> rel_type) const {
  if (!has_node(id)) throw NotFound(to_string(id));
  std::set<NodeId> out;
  auto matches = [&](const EdgeRecord& e) { return !rel_type || e.rel_type == *rel_type; };
  if (direction != Direction::In) {
    for (EdgeId e : out_edges(id)) {
      const auto& rec = edge(e);
      if (matches(rec)) out.insert(rec.target);
    }
  }
  if (direction != Direction::Out) {
    for (EdgeId e : in_edges(id)) {
      const auto& rec = edge(e);
      if (matches(rec)) out.insert(rec.source);
    }
  }
  return out;
}

const std::vector<NodeId>& PropertyGraph::nodes_with_label(std::string_view label) const {
  auto it = label_index_.find(std::string(label));
  return it == label_index_.end() ? kNoNodes : it->second;
}

std::vector<NodeId> PropertyGraph::find_nodes(
    std::string_view label, std::optional<std::pair<std::string, Scalar>> filter) const {
  if (!filter) return nodes_with_label(label);
  if (is_indexed_key(filter->first)) {
    auto it = prop_index_.find(index_key(label, filter->first, filter->second));
    return it == prop_index_.end() ? std::vector<NodeId>{} : it->second;
  }
  return scan_nodes(label, filter);
}

std::vector<NodeId> PropertyGraph::scan_nodes(
    std::string_view label, const std::optional<std::pair<std::string, Scalar>>& filter) const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.label != label) continue;
    if (filter) {
      auto it = n.properties.find(filter->first);
      if (it == n.properties.end() || !scalars_equal(it->second, filter->second)) continue;
    }
    out.push_back(n.id);
  }
  return out;
}

std::string PropertyGraph::check_integrity() const {
  for (const auto& e : edges_) {
    if (!has_node(e.source) || !has_node(e.target)) {
      return "edge " + to_string(e.id) + " has a dangling endpoint";
    }
  }
  std::size_t labelled = 0;
  for (const auto& [label, ids] : label_index_) {
    labelled += ids.size();
    for (NodeId id : ids) {
      const auto* n = find_node(id);
      if (!n || n->label != label) return "label index stale for " + to_string(id);
    }
  }
  if (labelled != nodes_.size()) return "label index size mismatch";
  for (const auto& n : nodes_) {
    for (const auto& [key, value] : n.properties) {
      if (!is_indexed_key(key)) continue;
      auto via_index = find_nodes(n.label, std::pair{key, value});
      if (via_index != scan_nodes(n.label, std::pair{key, value})) {
        return "property index incoherent for " + to_string(n.id) + "." + key;
      }
    }
  }
  return {};
}

}  // namespace hecix
