#include "hecix/ingest/hetionet.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "hecix/errors.hpp"
#include "hecix/ingest/text_io.hpp"

namespace hecix {

DiseaseNotFound::DiseaseNotFound(const std::string& spec, std::vector<std::string> candidates)
    : Error("DiseaseNotFound",
            [&] {
              std::string msg = "disease not found: " + spec;
              if (!candidates.empty()) {
                msg += " (nearest:";
                for (const auto& c : candidates) msg += " '" + c + "'";
                msg += ")";
              }
              return msg;
            }()),
      candidates_(std::move(candidates)) {}

}  // namespace hecix

namespace hecix::ingest {

namespace {

constexpr std::array<Metaedge, 24> kMetaedges{{
    {"AdG", "Anatomy", "DOWNREGULATES", "Gene"},
    {"AeG", "Anatomy", "EXPRESSES", "Gene"},
    {"AuG", "Anatomy", "UPREGULATES", "Gene"},
    {"CbG", "Compound", "BINDS", "Gene"},
    {"CcSE", "Compound", "CAUSES", "Side Effect"},
    {"CdG", "Compound", "DOWNREGULATES", "Gene"},
    {"CpD", "Compound", "PALLIATES", "Disease"},
    {"CrC", "Compound", "RESEMBLES", "Compound"},
    {"CtD", "Compound", "TREATS", "Disease"},
    {"CuG", "Compound", "UPREGULATES", "Gene"},
    {"DaG", "Disease", "ASSOCIATES", "Gene"},
    {"DdG", "Disease", "DOWNREGULATES", "Gene"},
    {"DlA", "Disease", "LOCALIZES", "Anatomy"},
    {"DpS", "Disease", "PRESENTS", "Symptom"},
    {"DrD", "Disease", "RESEMBLES", "Disease"},
    {"DuG", "Disease", "UPREGULATES", "Gene"},
    {"GcG", "Gene", "COVARIES", "Gene"},
    {"GiG", "Gene", "INTERACTS", "Gene"},
    {"GpBP", "Gene", "PARTICIPATES", "Biological Process"},
    {"GpCC", "Gene", "PARTICIPATES", "Cellular Component"},
    {"GpMF", "Gene", "PARTICIPATES", "Molecular Function"},
    {"GpPW", "Gene", "PARTICIPATES", "Pathway"},
    {"Gr>G", "Gene", "REGULATES", "Gene"},
    {"PCiC", "Pharmacologic Class", "INCLUDES", "Compound"},
}};

constexpr std::array<std::string_view, 8> kDiseaseMetaedges{"CtD", "CpD", "DaG", "DuG", "DdG", "DlA", "DpS", "DrD"};
constexpr std::array<std::string_view, 6> kExpandMetaedges{"CcSE", "PCiC", "GpBP", "GpMF", "GpCC", "GpPW"};
constexpr std::array<std::string_view, 3> kClosureMetaedges{"AeG", "AuG", "AdG"};

template <std::size_t N>
bool member(const std::array<std::string_view, N>& set, std::string_view v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Calls fn(line_no, line) for every line after the header.
template <typename Fn>
void for_each_record(std::string_view text, std::string_view expected_header, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != expected_header) throw MalformedRecord(1, "expected header '" + std::string(expected_header) + "'");
      continue;
    }
    if (line.empty()) continue;
    fn(line_no, line);
  }
}

std::pair<std::string_view, std::string_view> split_key(std::string_view key, std::size_t line_no) {
  const auto sep = key.find("::");
  if (sep == std::string_view::npos || sep == 0 || sep + 2 >= key.size()) {
    throw MalformedRecord(line_no, "node id without Kind:: prefix: " + std::string(key));
  }
  return {key.substr(0, sep), key.substr(sep + 2)};
}

}  // namespace

std::string Metaedge::rel_type() const {
  std::string abbrev(abbreviation);
  abbrev.erase(std::remove(abbrev.begin(), abbrev.end(), '>'), abbrev.end());
  return std::string(verb) + "_" + abbrev;
}

const std::vector<std::string_view>& hetionet_kinds() {
  static const std::vector<std::string_view> kinds{"Anatomy",   "Biological Process", "Cellular Component",
                                                   "Compound",  "Disease",            "Gene",
                                                   "Molecular Function", "Pathway",   "Pharmacologic Class",
                                                   "Side Effect", "Symptom"};
  return kinds;
}

std::string label_for_kind(std::string_view kind) {
  const auto& kinds = hetionet_kinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) throw UnknownKind(std::string(kind));
  std::string label;
  for (char c : kind) {
    if (c != ' ') label += c;
  }
  return label;
}

const Metaedge& metaedge(std::string_view abbreviation) {
  for (const auto& m : kMetaedges) {
    if (m.abbreviation == abbreviation) return m;
  }
  throw UnknownKind("metaedge " + std::string(abbreviation));
}

HetionetData parse_hetionet(std::string_view nodes_tsv, std::string_view edges_sif) {
  HetionetData data;
  std::unordered_map<std::string, std::string> kind_of;
  for_each_record(nodes_tsv, "id\tname\tkind", [&](std::size_t line_no, std::string_view line) {
    const auto fields = split_tabs(line);
    if (fields.size() != 3) throw MalformedRecord(line_no, "expected 3 fields, found " + std::to_string(fields.size()));
    const auto [kind, identifier] = split_key(fields[0], line_no);
    label_for_kind(fields[2]);
    if (kind != fields[2]) throw MalformedRecord(line_no, "id prefix does not match kind " + std::string(fields[2]));
    HetionetNode node{std::string(kind), std::string(identifier), std::string(fields[1])};
    if (!kind_of.emplace(node.key(), node.kind).second) throw MalformedRecord(line_no, "duplicate node " + node.key());
    data.nodes.push_back(std::move(node));
  });
  for_each_record(edges_sif, "source\tmetaedge\ttarget", [&](std::size_t line_no, std::string_view line) {
    const auto fields = split_tabs(line);
    if (fields.size() != 3) throw MalformedRecord(line_no, "expected 3 fields, found " + std::to_string(fields.size()));
    const Metaedge& m = metaedge(fields[1]);
    HetionetEdge edge{std::string(fields[0]), std::string(fields[1]), std::string(fields[2])};
    const auto src = kind_of.find(edge.source);
    const auto dst = kind_of.find(edge.target);
    if (src == kind_of.end()) throw MalformedRecord(line_no, "unknown source node " + edge.source);
    if (dst == kind_of.end()) throw MalformedRecord(line_no, "unknown target node " + edge.target);
    if (src->second != m.source_kind || dst->second != m.target_kind) {
      throw MalformedRecord(line_no, "endpoint kinds do not fit metaedge " + edge.metaedge);
    }
    data.edges.push_back(std::move(edge));
  });
  return data;
}

HetionetData load_hetionet(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw InputError("Hetionet directory not found: " + dir.string());
  auto find = [&](std::initializer_list<const char*> names) {
    for (const char* n : names) {
      if (std::filesystem::is_regular_file(dir / n)) return dir / n;
    }
    throw InputError("no " + std::string(*names.begin()) + " (or release-named variant) in " + dir.string());
  };
  const auto nodes = find({"nodes.tsv", "nodes.tsv.gz", "hetionet-v1.0-nodes.tsv", "hetionet-v1.0-nodes.tsv.gz"});
  const auto edges = find({"edges.sif", "edges.sif.gz", "hetionet-v1.0-edges.sif", "hetionet-v1.0-edges.sif.gz"});
  return parse_hetionet(read_text_file(nodes), read_text_file(edges));
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

PropertyGraph extract_disease_subgraph(const HetionetData& data, const std::vector<DiseaseSpec>& specs, int radius) {
  if (radius != 1 && radius != 2) throw InputError("radius must be 1 or 2");

  std::unordered_map<std::string, const HetionetNode*> by_key;
  for (const auto& n : data.nodes) by_key.emplace(n.key(), &n);

  // Resolve every spec before building anything.
  std::map<std::string, const DiseaseSpec*> spec_of;  // node key -> spec
  for (const auto& spec : specs) {
    const std::string key = "Disease::" + spec.hetionet_key;
    if (by_key.contains(key)) {
      spec_of.emplace(key, &spec);
      continue;
    }
    std::vector<std::pair<std::size_t, std::string>> scored;
    const std::string wanted = canonical_key(spec.canonical_name);
    for (const auto& n : data.nodes) {
      if (n.kind == "Disease") scored.emplace_back(edit_distance(wanted, canonical_key(n.name)), n.name + " (" + n.identifier + ")");
    }
    std::sort(scored.begin(), scored.end());
    std::vector<std::string> candidates;
    for (std::size_t i = 0; i < scored.size() && i < 3; ++i) candidates.push_back(scored[i].second);
    throw DiseaseNotFound(spec.canonical_name + " [" + spec.hetionet_key + "]", std::move(candidates));
  }

  std::set<std::string> included;
  std::vector<const HetionetEdge*> kept;
  for (const auto& [key, spec] : spec_of) included.insert(key);
  for (const auto& e : data.edges) {
    if (!member(kDiseaseMetaedges, e.metaedge)) continue;
    if (!spec_of.contains(e.source) && !spec_of.contains(e.target)) continue;
    kept.push_back(&e);
    included.insert(e.source);
    included.insert(e.target);
  }

  if (radius == 2) {
    const std::set<std::string> first_ring = included;
    for (const auto& e : data.edges) {
      if (!member(kExpandMetaedges, e.metaedge)) continue;
      // CcSE and Gp* expand from their source; PCiC reaches back from a compound.
      const bool from_source = e.metaedge != "PCiC";
      if (!first_ring.contains(from_source ? e.source : e.target)) continue;
      kept.push_back(&e);
      included.insert(e.source);
      included.insert(e.target);
    }
    for (const auto& e : data.edges) {
      if (member(kClosureMetaedges, e.metaedge) && first_ring.contains(e.source) && first_ring.contains(e.target)) {
        kept.push_back(&e);
      }
    }
    // Back to input order.
    std::sort(kept.begin(), kept.end());
  }

  PropertyGraph graph;
  std::unordered_map<std::string, NodeId> id_of;
  auto add = [&](const std::string& key) {
    const HetionetNode& n = *by_key.at(key);
    PropertyMap props{{"ext_id", n.identifier}};
    if (const auto s = spec_of.find(key); s != spec_of.end()) {
      props["name"] = canonical_key(s->second->canonical_name);
      props["display_name"] = s->second->canonical_name;
      props["hetionet_name"] = n.name;
    } else {
      props["name"] = n.name;
    }
    id_of.emplace(key, graph.add_node(label_for_kind(n.kind), std::move(props)));
  };
  // Spec diseases first in spec order, then the rest by node key.
  for (const auto& spec : specs) {
    const std::string key = "Disease::" + spec.hetionet_key;
    if (!id_of.contains(key)) add(key);
  }
  for (const auto& key : included) {
    if (!id_of.contains(key)) add(key);
  }
  for (const HetionetEdge* e : kept) {
    graph.add_edge(metaedge(e->metaedge).rel_type(), id_of.at(e->source), id_of.at(e->target));
  }
  return graph;
}

}  // namespace hecix::ingest
