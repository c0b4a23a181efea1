#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hecix/graph/property_graph.hpp"

namespace hecix::ingest {

struct MergeReport {
  std::size_t hetionet_nodes = 0;
  std::size_t hetionet_edges = 0;
  std::size_t ct_nodes = 0;
  std::size_t ct_edges = 0;
  std::size_t merged_nodes = 0;
  std::size_t merged_edges = 0;
  std::size_t disease_join_count = 0;
  std::size_t bridge_edges_added = 0;
  std::vector<std::string> unmatched_conditions;
  std::vector<std::string> skipped_studies;

  // merged_nodes == hetionet + ct - joins, merged_edges == hetionet + ct + bridges
  bool arithmetic_holds() const;
};

// Published totals of the original build, shown next to computed counts.
struct ReferenceCounts {
  static constexpr std::size_t hetionet_nodes = 1071;
  static constexpr std::size_t hetionet_edges = 1125;
  static constexpr std::size_t ct_nodes = 5454;
  static constexpr std::size_t ct_edges = 11466;
  static constexpr std::size_t merged_nodes = 6509;
  static constexpr std::size_t merged_edges = 14377;
};

struct MergeResult {
  PropertyGraph graph;
  MergeReport report;
};

// Hetionet nodes and edges are copied first, then the trials graph. A trials
// Disease node whose lower-cased name equals a Hetionet Disease name is
// unified with it (keeping ext_id and adding ct_ext_id). Condition nodes
// whose name equals a Hetionet Disease outside the configured set gain a
// MAPS_TO bridge edge (property bridge=true). unmatched_conditions lists
// conditions left without any MAPS_TO edge.
MergeResult merge_graphs(const PropertyGraph& hetionet, const PropertyGraph& ct);

nlohmann::json to_json(const MergeReport& report);
MergeReport merge_report_from_json(const nlohmann::json& j);

}  // namespace hecix::ingest
