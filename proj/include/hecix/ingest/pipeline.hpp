#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hecix/ingest/ctgov_fetch.hpp"
#include "hecix/ingest/disease_spec.hpp"
#include "hecix/ingest/merge.hpp"

namespace hecix::ingest {

struct IngestOptions {
  std::filesystem::path hetionet_dir;
  std::optional<std::filesystem::path> ctgov_dir;  // offline documents
  bool ctgov_fetch = false;                        // otherwise query the registry
  std::optional<std::filesystem::path> nct_list;
  std::optional<std::filesystem::path> diseases;   // default: the six built-in specs
  int radius = 1;
  FetchOptions fetch;
};

// Hetionet extraction, trials graph, merge, then the structural checks
// below. Throws on any violation.
MergeResult run_ingest(const IngestOptions& options);

// Violations of the merged-graph rules: referential integrity, every Study
// with at least one STUDIES and exactly one ELIGIBLE_SEX edge, no Condition
// without HAS_CONDITION, and relationship types limited to the disease
// metaedges (radius 1), their radius-2 additions, and the trial types.
std::vector<std::string> check_merged_graph(const PropertyGraph& graph, int radius);

// Path of the report written next to a snapshot: "<snapshot>.report.json".
std::filesystem::path report_path_for(const std::filesystem::path& snapshot);

// Snapshot plus report, both deterministic.
void write_outputs(const MergeResult& result, const std::filesystem::path& snapshot);

}  // namespace hecix::ingest
