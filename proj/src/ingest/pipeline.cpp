#include "hecix/ingest/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "hecix/errors.hpp"
#include "hecix/graph/snapshot.hpp"
#include "hecix/ingest/ctgov.hpp"
#include "hecix/ingest/hetionet.hpp"

namespace hecix::ingest {

MergeResult run_ingest(const IngestOptions& options) {
  const auto specs = options.diseases ? load_disease_specs(*options.diseases) : default_disease_specs();
  spdlog::info("loading Hetionet from {}", options.hetionet_dir.string());
  const auto hetionet = load_hetionet(options.hetionet_dir);
  spdlog::info("parsed {} Hetionet nodes, {} edges", hetionet.nodes.size(), hetionet.edges.size());
  auto sub = extract_disease_subgraph(hetionet, specs, options.radius);

  std::vector<StudyRecord> records;
  if (options.ctgov_dir) {
    records = load_ctgov_dir(*options.ctgov_dir);
  } else if (options.ctgov_fetch) {
    const auto docs = options.nct_list ? fetch_ctgov_by_ids(read_nct_list(*options.nct_list), options.fetch)
                                       : fetch_ctgov_studies(specs, options.fetch);
    records = studies_from_documents(docs);
  } else {
    throw InputError("no study source: give a document directory or enable fetching");
  }
  if (options.nct_list && options.ctgov_dir) {
    const auto wanted = read_nct_list(*options.nct_list);
    const std::set<std::string> keep(wanted.begin(), wanted.end());
    std::erase_if(records, [&](const StudyRecord& r) { return !keep.contains(r.nct_id); });
  }
  spdlog::info("{} study records", records.size());

  auto ct = build_ct_graph(records, specs);
  auto merged = merge_graphs(sub, ct.graph);
  merged.report.skipped_studies = std::move(ct.skipped_studies);

  auto problems = check_merged_graph(merged.graph, options.radius);
  if (!merged.report.arithmetic_holds()) problems.insert(problems.begin(), "merge report arithmetic does not hold");
  if (!problems.empty()) throw InputError("ingested graph fails checks: " + problems.front());
  return merged;
}

std::vector<std::string> check_merged_graph(const PropertyGraph& graph, int radius) {
  std::vector<std::string> problems;
  if (auto integrity = graph.check_integrity(); !integrity.empty()) problems.push_back(std::move(integrity));

  std::set<std::string> allowed;
  for (const char* m : {"CtD", "CpD", "DaG", "DuG", "DdG", "DlA", "DpS", "DrD"}) allowed.insert(metaedge(m).rel_type());
  if (radius == 2) {
    for (const char* m : {"CcSE", "PCiC", "GpBP", "GpMF", "GpCC", "GpPW", "AeG", "AuG", "AdG"}) {
      allowed.insert(metaedge(m).rel_type());
    }
  }
  for (auto t : kCtRelTypes) allowed.emplace(t);

  std::map<NodeId, std::pair<int, int>> per_study;  // STUDIES, ELIGIBLE_SEX
  std::set<NodeId> conditions_with_study;
  for (const auto& e : graph.edges()) {
    if (!allowed.contains(e.rel_type)) problems.push_back("unexpected relationship type " + e.rel_type);
    if (e.rel_type == "STUDIES") ++per_study[e.source].first;
    if (e.rel_type == "ELIGIBLE_SEX") ++per_study[e.source].second;
    if (e.rel_type == "HAS_CONDITION") conditions_with_study.insert(e.target);
  }
  for (const auto& n : graph.nodes()) {
    if (n.label == "Study") {
      const auto [studies, sex] = per_study[n.id];
      if (studies < 1) problems.push_back(to_string(n.id) + ": study without STUDIES edge");
      if (sex != 1) problems.push_back(to_string(n.id) + ": study needs exactly one ELIGIBLE_SEX edge");
    }
    if (n.label == "Condition" && !conditions_with_study.contains(n.id)) {
      problems.push_back(to_string(n.id) + ": orphaned condition");
    }
  }
  return problems;
}

std::filesystem::path report_path_for(const std::filesystem::path& snapshot) {
  auto p = snapshot;
  p += ".report.json";
  return p;
}

void write_outputs(const MergeResult& result, const std::filesystem::path& snapshot) {
  snapshot_save(result.graph, snapshot);
  const auto report = report_path_for(snapshot);
  std::ofstream out(report, std::ios::binary);
  if (!out) throw InputError("cannot write " + report.string());
  out << to_json(result.report).dump(2) << '\n';
}

}  // namespace hecix::ingest
