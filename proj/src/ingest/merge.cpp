#include "hecix/ingest/merge.hpp"

#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "hecix/ingest/disease_spec.hpp"

namespace hecix::ingest {

bool MergeReport::arithmetic_holds() const {
  return merged_nodes + disease_join_count == hetionet_nodes + ct_nodes &&
         merged_edges == hetionet_edges + ct_edges + bridge_edges_added;
}

namespace {

std::string text_property(const NodeRecord& n, const std::string& key) {
  const auto it = n.properties.find(key);
  if (it == n.properties.end()) return {};
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  return {};
}

}  // namespace

MergeResult merge_graphs(const PropertyGraph& hetionet, const PropertyGraph& ct) {
  MergeResult out;
  PropertyGraph& g = out.graph;
  MergeReport& report = out.report;

  std::map<NodeId, NodeId> from_het;
  std::map<std::string, NodeId> het_disease;  // canonical key -> merged id
  for (const auto& n : hetionet.nodes()) {
    const NodeId id = g.add_node(n.label, n.properties);
    from_het.emplace(n.id, id);
    if (n.label == "Disease") het_disease.emplace(canonical_key(text_property(n, "name")), id);
  }
  for (const auto& e : hetionet.edges()) g.add_edge(e.rel_type, from_het.at(e.source), from_het.at(e.target), e.properties);

  std::map<NodeId, NodeId> from_ct;
  std::set<NodeId> joined;
  for (const auto& n : ct.nodes()) {
    if (n.label == "Disease") {
      const auto it = het_disease.find(canonical_key(text_property(n, "name")));
      if (it != het_disease.end() && !joined.contains(it->second)) {
        joined.insert(it->second);
        from_ct.emplace(n.id, it->second);
        if (const auto ext = n.properties.find("ext_id"); ext != n.properties.end()) {
          g.set_node_property(it->second, "ct_ext_id", ext->second);
        }
        continue;
      }
    }
    from_ct.emplace(n.id, g.add_node(n.label, n.properties));
  }
  std::set<NodeId> mapped;
  for (const auto& e : ct.edges()) {
    const NodeId s = from_ct.at(e.source);
    const NodeId t = from_ct.at(e.target);
    g.add_edge(e.rel_type, s, t, e.properties);
    if (e.rel_type == "MAPS_TO") mapped.insert(s);
  }

  // Bridges from trial conditions to Hetionet diseases outside the join.
  for (const auto& n : ct.nodes()) {
    if (n.label != "Condition") continue;
    const NodeId c = from_ct.at(n.id);
    const auto it = het_disease.find(canonical_key(text_property(n, "name")));
    if (it != het_disease.end() && !joined.contains(it->second) && !mapped.contains(c)) {
      g.add_edge("MAPS_TO", c, it->second, {{"bridge", true}});
      mapped.insert(c);
      ++report.bridge_edges_added;
    }
    if (!mapped.contains(c)) report.unmatched_conditions.push_back(text_property(n, "name"));
  }

  report.hetionet_nodes = hetionet.stats().nodes;
  report.hetionet_edges = hetionet.stats().edges;
  report.ct_nodes = ct.stats().nodes;
  report.ct_edges = ct.stats().edges;
  report.merged_nodes = g.stats().nodes;
  report.merged_edges = g.stats().edges;
  report.disease_join_count = joined.size();
  return out;
}

nlohmann::json to_json(const MergeReport& r) {
  using nlohmann::json;
  auto side = [](std::size_t nodes, std::size_t edges, std::size_t ref_nodes, std::size_t ref_edges) {
    return json{{"nodes", nodes}, {"edges", edges}, {"reference_nodes", ref_nodes}, {"reference_edges", ref_edges}};
  };
  const long long summed_nodes = static_cast<long long>(ReferenceCounts::hetionet_nodes + ReferenceCounts::ct_nodes);
  const long long summed_edges = static_cast<long long>(ReferenceCounts::hetionet_edges + ReferenceCounts::ct_edges);
  return json{
      {"hetionet", side(r.hetionet_nodes, r.hetionet_edges, ReferenceCounts::hetionet_nodes, ReferenceCounts::hetionet_edges)},
      {"ct", side(r.ct_nodes, r.ct_edges, ReferenceCounts::ct_nodes, ReferenceCounts::ct_edges)},
      {"merged", side(r.merged_nodes, r.merged_edges, ReferenceCounts::merged_nodes, ReferenceCounts::merged_edges)},
      {"disease_join_count", r.disease_join_count},
      {"bridge_edges_added", r.bridge_edges_added},
      {"unmatched_conditions", r.unmatched_conditions},
      {"skipped_studies", r.skipped_studies},
      {"arithmetic_holds", r.arithmetic_holds()},
      // The published merged totals do not follow from the published parts:
      // these are the implied join and extra-edge counts.
      {"reference_implied_joins", summed_nodes - static_cast<long long>(ReferenceCounts::merged_nodes)},
      {"reference_implied_extra_edges", static_cast<long long>(ReferenceCounts::merged_edges) - summed_edges},
  };
}

MergeReport merge_report_from_json(const nlohmann::json& j) {
  MergeReport r;
  r.hetionet_nodes = j.at("hetionet").at("nodes").get<std::size_t>();
  r.hetionet_edges = j.at("hetionet").at("edges").get<std::size_t>();
  r.ct_nodes = j.at("ct").at("nodes").get<std::size_t>();
  r.ct_edges = j.at("ct").at("edges").get<std::size_t>();
  r.merged_nodes = j.at("merged").at("nodes").get<std::size_t>();
  r.merged_edges = j.at("merged").at("edges").get<std::size_t>();
  r.disease_join_count = j.at("disease_join_count").get<std::size_t>();
  r.bridge_edges_added = j.at("bridge_edges_added").get<std::size_t>();
  r.unmatched_conditions = j.at("unmatched_conditions").get<std::vector<std::string>>();
  r.skipped_studies = j.value("skipped_studies", std::vector<std::string>{});
  return r;
}

}  // namespace hecix::ingest
