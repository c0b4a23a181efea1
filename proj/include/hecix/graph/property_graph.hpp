#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hecix/graph/value.hpp"

namespace hecix {

struct NodeRecord {
  NodeId id;
  std::string label;
  PropertyMap properties;

  bool operator==(const NodeRecord&) const = default;
};

struct EdgeRecord {
  EdgeId id;
  std::string rel_type;
  NodeId source;
  NodeId target;
  PropertyMap properties;

  bool operator==(const EdgeRecord&) const = default;
};

enum class Direction { Out, In, Both };

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  bool operator==(const GraphStats&) const = default;
};

// In-memory labeled property graph. Node and edge ids are monotonic counters
// unless an explicit id is supplied (snapshot load, ingestion replay).
//
// Reads are safe from many threads; mutation requires exclusive access.
class PropertyGraph {
public:
  static constexpr std::string_view kIndexedKeys[] = {"name", "ext_id"};

  NodeId add_node(std::string label, PropertyMap properties,
                  std::optional<NodeId> explicit_id = std::nullopt);
  EdgeId add_edge(std::string rel_type, NodeId source, NodeId target, PropertyMap properties = {},
                  std::optional<EdgeId> explicit_id = std::nullopt);

  // Set or overwrite one property on an existing node, keeping indexes current.
  void set_node_property(NodeId id, const std::string& key, Scalar value);

  const NodeRecord& node(NodeId id) const;
  const EdgeRecord& edge(EdgeId id) const;
  const NodeRecord* find_node(NodeId id) const;
  bool has_node(NodeId id) const { return node_slot_.contains(id.value); }

  // Ascending by id.
  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  const std::vector<EdgeRecord>& edges() const { return edges_; }

  // Incident edge ids, ascending.
  std::span<const EdgeId> out_edges(NodeId id) const;
  std::span<const EdgeId> in_edges(NodeId id) const;

  std::set<NodeId> neighbors(NodeId id, Direction direction,
                             std::optional<std::string_view> rel_type = std::nullopt) const;

  // Uses the property index when filter_key is indexed; otherwise scans the
  // label's nodes. Result is ascending.
  std::vector<NodeId> find_nodes(std::string_view label,
                                 std::optional<std::pair<std::string, Scalar>> filter = std::nullopt) const;

  // Linear scan with the same semantics as find_nodes (used for coherence checks).
  std::vector<NodeId> scan_nodes(std::string_view label,
                                 const std::optional<std::pair<std::string, Scalar>>& filter) const;

  const std::vector<NodeId>& nodes_with_label(std::string_view label) const;

  GraphStats stats() const { return {nodes_.size(), edges_.size()}; }

  // Referential integrity and index coherence; returns a description of the
  // first violation or an empty string.
  std::string check_integrity() const;

  static bool is_indexed_key(std::string_view key);

private:
  static std::string index_key(std::string_view label, std::string_view key, const Scalar& value);
  void index_node_property(const NodeRecord& node, const std::string& key, const Scalar& value);
  void unindex_node_property(const NodeRecord& node, const std::string& key, const Scalar& value);

  std::vector<NodeRecord> nodes_;
  std::vector<EdgeRecord> edges_;
  std::unordered_map<std::uint64_t, std::size_t> node_slot_;
  std::unordered_map<std::uint64_t, std::size_t> edge_slot_;
  std::unordered_map<std::uint64_t, std::vector<EdgeId>> out_;
  std::unordered_map<std::uint64_t, std::vector<EdgeId>> in_;
  std::unordered_map<std::string, std::vector<NodeId>> label_index_;
  std::unordered_map<std::string, std::vector<NodeId>> prop_index_;
  std::uint64_t next_node_ = 0;
  std::uint64_t next_edge_ = 0;
};

// Cypher-style scalar equality: ints and doubles compare numerically,
// other types must match exactly.
bool scalars_equal(const Scalar& a, const Scalar& b);

}  // namespace hecix
