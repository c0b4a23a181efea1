#include "hecix/ingest/disease_spec.hpp"

#include <cctype>
#include <fstream>
#include <set>

#include "hecix/errors.hpp"

namespace hecix::ingest {

const std::vector<DiseaseSpec>& default_disease_specs() {
  static const std::vector<DiseaseSpec> specs{
      {"Vitiligo", "DOID:12306", {"vitiligo"}},
      {"Atopic Dermatitis", "DOID:3310", {"atopic dermatitis", "atopic eczema"}},
      {"Alopecia Areata", "DOID:986", {"alopecia areata"}},
      {"melanoma", "DOID:1909", {"melanoma"}},
      {"Epilepsy", "DOID:1826", {"epilepsy", "epileptic", "seizure disorder"}},
      {"Hypothyroidism", "DOID:1459", {"hypothyroidism", "hypothyroid"}},
  };
  return specs;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string canonical_key(std::string_view name) {
  std::string out;
  bool pending_space = false;
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::vector<DiseaseSpec> parse_disease_specs(std::istream& in) {
  std::vector<DiseaseSpec> specs;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) throw MalformedRecord(line_no, "expected 3 tab-separated fields");
    DiseaseSpec spec{trim(fields[0]), trim(fields[1]), {}};
    for (const auto& term : split(fields[2], ',')) {
      if (auto t = trim(term); !t.empty()) spec.ctgov_terms.push_back(std::move(t));
    }
    if (spec.canonical_name.empty() || spec.hetionet_key.empty()) throw MalformedRecord(line_no, "empty name or key");
    if (spec.ctgov_terms.empty()) throw MalformedRecord(line_no, "no search terms");
    if (!seen.insert(canonical_key(spec.canonical_name)).second) {
      throw MalformedRecord(line_no, "duplicate disease " + spec.canonical_name);
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<DiseaseSpec> load_disease_specs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read disease spec file " + path.string());
  return parse_disease_specs(in);
}

std::optional<std::string> normalize_condition(std::string_view text, const std::vector<DiseaseSpec>& specs) {
  const std::string hay = canonical_key(text);
  for (const auto& spec : specs) {
    for (const auto& term : spec.ctgov_terms) {
      const std::string needle = canonical_key(term);
      if (needle.empty()) continue;
      for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
        const bool left_ok = pos == 0 || !is_word_char(hay[pos - 1]);
        const auto end = pos + needle.size();
        const bool right_ok = end == hay.size() || !is_word_char(hay[end]);
        if (left_ok && right_ok) return spec.canonical_name;
      }
    }
  }
  return std::nullopt;
}

}  // namespace hecix::ingest
