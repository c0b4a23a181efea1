#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hecix/ingest/disease_spec.hpp"

namespace hecix::ingest {

struct FetchOptions {
  std::string base_url = "https://clinicaltrials.gov";
  std::size_t per_disease = 200;  // top-N by registry relevance
  std::size_t page_size = 100;
  std::chrono::milliseconds timeout{30000};
};

// Pages through /api/v2/studies with query.cond set to each spec's terms
// joined with OR. Returns the raw study documents.
std::vector<nlohmann::json> fetch_ctgov_studies(const std::vector<DiseaseSpec>& specs, const FetchOptions& options);

// Exactly the listed studies, via filter.ids in batches.
std::vector<nlohmann::json> fetch_ctgov_by_ids(const std::vector<std::string>& nct_ids, const FetchOptions& options);

// One NCT id per line; '#' comments and blank lines ignored. Throws InputError.
std::vector<std::string> read_nct_list(const std::filesystem::path& path);

}  // namespace hecix::ingest
