#include "hecix/ingest/ctgov_fetch.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <nlohmann/json.hpp>

#include "hecix/errors.hpp"
#include "hecix/ingest/ctgov.hpp"
#include "hecix/net/http.hpp"

namespace hecix::ingest {

using nlohmann::json;

namespace {

json get_page(const FetchOptions& options, std::map<std::string, std::string> query) {
  query["format"] = "json";
  const auto response = net::http_get(options.base_url + "/api/v2/studies", query, options.timeout);
  if (response.status != 200) {
    throw InputError("registry returned HTTP " + std::to_string(response.status));
  }
  try {
    return json::parse(response.body);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("registry response is not JSON: ") + e.what());
  }
}

// Follows nextPageToken until limit studies are collected or pages run out.
void collect(const FetchOptions& options, std::map<std::string, std::string> query, std::size_t limit,
             std::vector<json>& out) {
  std::size_t taken = 0;
  while (taken < limit) {
    query["pageSize"] = std::to_string(std::min(options.page_size, limit - taken));
    const json page = get_page(options, query);
    const auto studies = page.find("studies");
    if (studies == page.end() || !studies->is_array() || studies->empty()) break;
    for (const auto& s : *studies) {
      if (taken++ >= limit) break;
      out.push_back(s);
    }
    const auto token = page.find("nextPageToken");
    if (token == page.end() || !token->is_string()) break;
    query["pageToken"] = token->get<std::string>();
  }
}

}  // namespace

std::vector<json> fetch_ctgov_studies(const std::vector<DiseaseSpec>& specs, const FetchOptions& options) {
  std::vector<json> out;
  for (const auto& spec : specs) {
    std::string cond;
    for (const auto& term : spec.ctgov_terms) {
      if (!cond.empty()) cond += " OR ";
      cond += "\"" + term + "\"";
    }
    const std::size_t before = out.size();
    collect(options, {{"query.cond", cond}}, options.per_disease, out);
    spdlog::info("fetched {} studies for {}", out.size() - before, spec.canonical_name);
  }
  return out;
}

std::vector<json> fetch_ctgov_by_ids(const std::vector<std::string>& nct_ids, const FetchOptions& options) {
  constexpr std::size_t kBatch = 100;
  std::vector<json> out;
  for (std::size_t i = 0; i < nct_ids.size(); i += kBatch) {
    std::string ids;
    for (std::size_t j = i; j < std::min(nct_ids.size(), i + kBatch); ++j) {
      if (!ids.empty()) ids += ",";
      ids += nct_ids[j];
    }
    collect(options, {{"filter.ids", ids}}, std::min(kBatch, nct_ids.size() - i), out);
  }
  if (out.size() != nct_ids.size()) spdlog::warn("requested {} studies, registry returned {}", nct_ids.size(), out.size());
  return out;
}

std::vector<std::string> read_nct_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read NCT list " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string id;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) id += c;
    }
    if (id.empty()) continue;
    if (!is_nct_id(id)) throw InputError("not an NCT identifier in " + path.string() + ": " + id);
    ids.push_back(id);
  }
  return ids;
}

}  // namespace hecix::ingest
