#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hecix/graph/property_graph.hpp"
#include "hecix/ingest/disease_spec.hpp"

namespace hecix::ingest {

struct InterventionEntry {
  std::string type;
  std::string name;
  bool operator==(const InterventionEntry&) const = default;
};

struct Official {
  std::string name;
  std::string role;
  std::string affiliation;
  bool operator==(const Official&) const = default;
};

struct LocationEntry {
  std::string facility;
  std::string city;
  std::string country;
  bool operator==(const LocationEntry&) const = default;
};

// One registry study, normalized. Absent list fields are empty, absent
// text fields are "", sex defaults to "ALL".
struct StudyRecord {
  std::string nct_id;
  std::string title;
  std::string status;
  std::vector<std::string> conditions;
  std::vector<std::string> phases;
  std::vector<InterventionEntry> interventions;
  std::vector<Official> officials;
  std::vector<LocationEntry> locations;
  std::string min_age;
  std::string max_age;
  std::vector<std::string> std_ages;
  std::string sex = "ALL";

  bool operator==(const StudyRecord&) const = default;
};

bool is_nct_id(std::string_view text);

// Registry v2 document (the object with protocolSection). Throws
// MissingField("nct_id") without an identifier and InputError when it is not
// of the form NCT + 8 digits.
StudyRecord parse_ctgov_study(const nlohmann::json& document);
StudyRecord parse_ctgov_study(std::string_view json_text);

// Every *.json file in dir (sorted by name). A file holds one study or a
// search page {"studies": [...]}. Records come back sorted by nct_id; later
// duplicates are dropped.
std::vector<StudyRecord> load_ctgov_dir(const std::filesystem::path& dir);
std::vector<StudyRecord> studies_from_documents(const std::vector<nlohmann::json>& documents);

struct CtGraph {
  PropertyGraph graph;
  // Studies none of whose conditions (nor title) name a spec disease.
  std::vector<std::string> skipped_studies;
};

// Nodes: Disease (one per spec, always), Study, PI, Condition, Phase,
// Location, Intervention, AgeGroup, Sex. Edges: STUDIES, HAS_CONDITION,
// MAPS_TO, LED_BY, IN_PHASE, CONDUCTED_AT, USES, ELIGIBLE_AGE, ELIGIBLE_SEX,
// AFFILIATED_WITH. Nodes are deduplicated on their natural keys.
CtGraph build_ct_graph(const std::vector<StudyRecord>& records, const std::vector<DiseaseSpec>& specs);

inline constexpr std::string_view kCtRelTypes[] = {"STUDIES",      "HAS_CONDITION", "MAPS_TO", "LED_BY",
                                                   "IN_PHASE",     "CONDUCTED_AT",  "USES",    "ELIGIBLE_AGE",
                                                   "ELIGIBLE_SEX", "AFFILIATED_WITH"};

}  // namespace hecix::ingest
