#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hecix::ingest {

struct DiseaseSpec {
  std::string canonical_name;
  std::string hetionet_key;  // DOID, e.g. "DOID:12306"
  std::vector<std::string> ctgov_terms;

  bool operator==(const DiseaseSpec&) const = default;
};

// Vitiligo, Atopic Dermatitis, Alopecia Areata, melanoma, Epilepsy, Hypothyroidism.
const std::vector<DiseaseSpec>& default_disease_specs();

// One disease per line: canonical_name TAB hetionet_key TAB term,term,...
// Blank lines and lines starting with '#' are skipped.
// Throws MalformedRecord on a bad line or a repeated canonical name.
std::vector<DiseaseSpec> parse_disease_specs(std::istream& in);
std::vector<DiseaseSpec> load_disease_specs(const std::filesystem::path& path);

// Lower-cased, whitespace-trimmed, inner runs of whitespace collapsed.
std::string canonical_key(std::string_view name);

// Canonical name of the first spec with a term occurring in text as a whole
// phrase (case-insensitive, bounded by non-alphanumerics).
std::optional<std::string> normalize_condition(std::string_view text, const std::vector<DiseaseSpec>& specs);

}  // namespace hecix::ingest
