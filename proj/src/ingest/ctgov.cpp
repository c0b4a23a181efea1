#include "hecix/ingest/ctgov.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "hecix/errors.hpp"
#include "hecix/ingest/text_io.hpp"

namespace hecix::ingest {

using nlohmann::json;

namespace {

std::string trimmed(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

const json* at_path(const json& doc, std::initializer_list<const char*> path) {
  const json* cur = &doc;
  for (const char* key : path) {
    if (!cur->is_object()) return nullptr;
    const auto it = cur->find(key);
    if (it == cur->end()) return nullptr;
    cur = &*it;
  }
  return cur;
}

std::string text_at(const json* node, const char* key) {
  if (!node || !node->is_object()) return {};
  const auto it = node->find(key);
  if (it == node->end() || !it->is_string()) return {};
  return trimmed(it->get<std::string>());
}

std::vector<std::string> strings_at(const json* node, const char* key) {
  std::vector<std::string> out;
  if (!node || !node->is_object()) return out;
  const auto it = node->find(key);
  if (it == node->end() || !it->is_array()) return out;
  for (const auto& v : *it) {
    if (!v.is_string()) continue;
    auto s = trimmed(v.get<std::string>());
    if (!s.empty() && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  }
  return out;
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

bool is_nct_id(std::string_view text) {
  if (text.size() != 11 || text.substr(0, 3) != "NCT") return false;
  return std::all_of(text.begin() + 3, text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

StudyRecord parse_ctgov_study(const json& document) {
  const json* protocol = at_path(document, {"protocolSection"});
  const json* ident = protocol ? at_path(*protocol, {"identificationModule"}) : nullptr;
  StudyRecord r;
  r.nct_id = text_at(ident, "nctId");
  if (r.nct_id.empty()) throw MissingField("nct_id");
  if (!is_nct_id(r.nct_id)) throw InputError("not an NCT identifier: " + r.nct_id);

  r.title = text_at(ident, "briefTitle");
  if (r.title.empty()) r.title = text_at(ident, "officialTitle");
  r.status = text_at(at_path(*protocol, {"statusModule"}), "overallStatus");
  r.conditions = strings_at(at_path(*protocol, {"conditionsModule"}), "conditions");
  r.phases = strings_at(at_path(*protocol, {"designModule"}), "phases");

  if (const json* list = at_path(*protocol, {"armsInterventionsModule", "interventions"}); list && list->is_array()) {
    for (const auto& i : *list) {
      InterventionEntry entry{text_at(&i, "type"), text_at(&i, "name")};
      if (entry.name.empty()) continue;
      if (std::find(r.interventions.begin(), r.interventions.end(), entry) == r.interventions.end()) {
        r.interventions.push_back(std::move(entry));
      }
    }
  }
  const json* contacts = at_path(*protocol, {"contactsLocationsModule"});
  if (const json* list = contacts ? at_path(*contacts, {"overallOfficials"}) : nullptr; list && list->is_array()) {
    for (const auto& o : *list) {
      Official entry{text_at(&o, "name"), text_at(&o, "role"), text_at(&o, "affiliation")};
      if (!entry.name.empty()) r.officials.push_back(std::move(entry));
    }
  }
  if (const json* list = contacts ? at_path(*contacts, {"locations"}) : nullptr; list && list->is_array()) {
    for (const auto& l : *list) {
      LocationEntry entry{text_at(&l, "facility"), text_at(&l, "city"), text_at(&l, "country")};
      if (entry.facility.empty() && entry.city.empty()) continue;
      if (std::find(r.locations.begin(), r.locations.end(), entry) == r.locations.end()) {
        r.locations.push_back(std::move(entry));
      }
    }
  }

  const json* eligibility = at_path(*protocol, {"eligibilityModule"});
  if (!eligibility) spdlog::debug("{}: no eligibility module, sex defaults to ALL", r.nct_id);
  r.min_age = text_at(eligibility, "minimumAge");
  r.max_age = text_at(eligibility, "maximumAge");
  for (auto& a : strings_at(eligibility, "stdAges")) r.std_ages.push_back(upper(std::move(a)));
  const std::string sex = upper(text_at(eligibility, "sex"));
  if (sex == "FEMALE" || sex == "MALE") {
    r.sex = sex;
  } else if (!sex.empty() && sex != "ALL") {
    spdlog::warn("{}: unrecognized sex '{}', using ALL", r.nct_id, sex);
  }
  if (r.conditions.empty()) spdlog::debug("{}: no conditions listed", r.nct_id);
  return r;
}

StudyRecord parse_ctgov_study(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("study document is not valid JSON: ") + e.what());
  }
  return parse_ctgov_study(doc);
}

std::vector<StudyRecord> studies_from_documents(const std::vector<json>& documents) {
  std::map<std::string, StudyRecord> by_id;
  auto take = [&](const json& study) {
    auto record = parse_ctgov_study(study);
    by_id.try_emplace(record.nct_id, std::move(record));
  };
  for (const auto& doc : documents) {
    if (doc.is_object() && doc.contains("studies")) {
      for (const auto& s : doc.at("studies")) take(s);
    } else if (doc.is_array()) {
      for (const auto& s : doc) take(s);
    } else {
      take(doc);
    }
  }
  std::vector<StudyRecord> out;
  out.reserve(by_id.size());
  for (auto& [id, r] : by_id) out.push_back(std::move(r));
  return out;
}

std::vector<StudyRecord> load_ctgov_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw InputError("study directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto& p = entry.path();
    const auto name = p.filename().string();
    if (entry.is_regular_file() && (name.ends_with(".json") || name.ends_with(".json.gz"))) files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  std::vector<json> docs;
  for (const auto& f : files) {
    try {
      docs.push_back(json::parse(read_text_file(f)));
    } catch (const json::parse_error& e) {
      throw InputError(f.string() + ": " + e.what());
    }
  }
  return studies_from_documents(docs);
}

namespace {

class CtBuilder {
public:
  explicit CtBuilder(const std::vector<DiseaseSpec>& specs) : specs_(specs) {
    for (const auto& spec : specs) {
      const auto key = canonical_key(spec.canonical_name);
      diseases_[spec.canonical_name] = graph_.add_node(
          "Disease", {{"name", key}, {"display_name", spec.canonical_name}, {"ext_id", "ctgov:" + key}});
    }
  }

  bool add_study(const StudyRecord& r) {
    std::vector<std::pair<std::string, std::optional<std::string>>> conditions;
    std::vector<std::string> targets;
    for (const auto& c : r.conditions) {
      auto disease = normalize_condition(c, specs_);
      if (disease && std::find(targets.begin(), targets.end(), *disease) == targets.end()) targets.push_back(*disease);
      conditions.emplace_back(c, std::move(disease));
    }
    if (targets.empty()) {
      if (auto from_title = normalize_condition(r.title, specs_)) targets.push_back(*from_title);
    }
    if (targets.empty()) return false;

    PropertyMap props{{"name", r.nct_id}, {"ext_id", r.nct_id}};
    if (!r.title.empty()) props["title"] = r.title;
    if (!r.status.empty()) props["status"] = r.status;
    if (!r.min_age.empty()) props["min_age"] = r.min_age;
    if (!r.max_age.empty()) props["max_age"] = r.max_age;
    const NodeId study = graph_.add_node("Study", std::move(props));

    for (const auto& d : targets) graph_.add_edge("STUDIES", study, diseases_.at(d));
    for (const auto& [text, disease] : conditions) {
      const NodeId c = intern("Condition", text, {{"name", text}});
      graph_.add_edge("HAS_CONDITION", study, c);
      if (disease && maps_to_.emplace(c, *disease).second) graph_.add_edge("MAPS_TO", c, diseases_.at(*disease));
    }
    std::vector<std::pair<std::string, NodeId>> sites;
    for (const auto& l : r.locations) {
      const std::string key = l.facility + "|" + l.city + "|" + l.country;
      PropertyMap lp{{"name", l.facility.empty() ? l.city : l.facility}, {"ext_id", key}};
      if (!l.city.empty()) lp["city"] = l.city;
      if (!l.country.empty()) lp["country"] = l.country;
      sites.emplace_back(lower(l.facility), intern("Location", key, std::move(lp)));
    }
    for (const auto& o : r.officials) {
      PropertyMap pp{{"name", o.name}};
      if (!o.affiliation.empty()) pp["affiliation"] = o.affiliation;
      const NodeId pi = intern("PI", o.name, std::move(pp));
      PropertyMap edge_props;
      if (!o.role.empty()) edge_props["role"] = o.role;
      graph_.add_edge("LED_BY", study, pi, std::move(edge_props));
      // An official is affiliated with a study site whose facility name
      // occurs in the affiliation text.
      const std::string affiliation = lower(o.affiliation);
      for (const auto& [facility, loc] : sites) {
        if (facility.empty() || affiliation.find(facility) == std::string::npos) continue;
        if (affiliated_.emplace(pi, loc).second) graph_.add_edge("AFFILIATED_WITH", pi, loc);
      }
    }
    for (const auto& p : r.phases) graph_.add_edge("IN_PHASE", study, intern("Phase", p, {{"name", p}}));
    for (const auto& [facility, loc] : sites) graph_.add_edge("CONDUCTED_AT", study, loc);
    for (const auto& i : r.interventions) {
      PropertyMap ip{{"name", i.name}, {"ext_id", i.type + ":" + i.name}};
      if (!i.type.empty()) ip["type"] = i.type;
      graph_.add_edge("USES", study, intern("Intervention", i.type + ":" + i.name, std::move(ip)));
    }
    for (const auto& a : r.std_ages) graph_.add_edge("ELIGIBLE_AGE", study, intern("AgeGroup", a, {{"name", a}}));
    graph_.add_edge("ELIGIBLE_SEX", study, intern("Sex", r.sex, {{"name", r.sex}}));
    return true;
  }

  PropertyGraph take() { return std::move(graph_); }

private:
  NodeId intern(const std::string& label, const std::string& key, PropertyMap props) {
    auto [it, inserted] = interned_.try_emplace({label, key});
    if (inserted) it->second = graph_.add_node(label, std::move(props));
    return it->second;
  }

  const std::vector<DiseaseSpec>& specs_;
  PropertyGraph graph_;
  std::map<std::string, NodeId> diseases_;
  std::map<std::pair<std::string, std::string>, NodeId> interned_;
  std::set<std::pair<NodeId, std::string>> maps_to_;
  std::set<std::pair<NodeId, NodeId>> affiliated_;
};

}  // namespace

CtGraph build_ct_graph(const std::vector<StudyRecord>& records, const std::vector<DiseaseSpec>& specs) {
  CtBuilder builder(specs);
  CtGraph out;
  std::vector<const StudyRecord*> ordered;
  for (const auto& r : records) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->nct_id < b->nct_id; });
  std::set<std::string> seen;
  for (const StudyRecord* r : ordered) {
    if (!seen.insert(r->nct_id).second) continue;
    if (!builder.add_study(*r)) {
      spdlog::info("{}: no condition matches a configured disease; study skipped", r->nct_id);
      out.skipped_studies.push_back(r->nct_id);
    }
  }
  out.graph = builder.take();
  return out;
}

}  // namespace hecix::ingest
