#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hecix/graph/property_graph.hpp"
#include "hecix/ingest/disease_spec.hpp"

namespace hecix::ingest {

struct HetionetNode {
  std::string kind;        // "Biological Process"
  std::string identifier;  // "GO:0071357"
  std::string name;

  std::string key() const { return kind + "::" + identifier; }
  bool operator==(const HetionetNode&) const = default;
};

struct HetionetEdge {
  std::string source;    // "Gene::9021"
  std::string metaedge;  // "GpBP", as written in the export
  std::string target;

  bool operator==(const HetionetEdge&) const = default;
};

struct HetionetData {
  std::vector<HetionetNode> nodes;
  std::vector<HetionetEdge> edges;
};

struct Metaedge {
  std::string_view abbreviation;  // "Gr>G"
  std::string_view source_kind;
  std::string_view verb;          // "REGULATES"
  std::string_view target_kind;

  // "REGULATES_GrG": verb plus the abbreviation without '>'.
  std::string rel_type() const;
};

// The eleven node kinds of the integrated network.
const std::vector<std::string_view>& hetionet_kinds();
// Node label for a kind: spaces removed ("SideEffect"). Throws UnknownKind.
std::string label_for_kind(std::string_view kind);
// Throws UnknownKind for an abbreviation outside the 24 metaedges.
const Metaedge& metaedge(std::string_view abbreviation);

// Nodes table (header `id<TAB>name<TAB>kind`, ids `Kind::identifier`) and
// edges in SIF form (header `source<TAB>metaedge<TAB>target`).
// Throws MalformedRecord(line) or UnknownKind.
HetionetData parse_hetionet(std::string_view nodes_tsv, std::string_view edges_sif);

// Directory holding nodes.tsv / edges.sif or the release names
// hetionet-v1.0-nodes.tsv / hetionet-v1.0-edges.sif, optionally gzipped.
HetionetData load_hetionet(const std::filesystem::path& dir);

// Radius 1: the spec diseases, every node joined to one of them by a
// Disease-incident metaedge (CtD CpD DaG DuG DdG DlA DpS DrD), and exactly
// those edges. Radius 2 adds CcSE, PCiC and Gene->BP/MF/CC/Pathway
// neighbors, plus Anatomy->Gene edges whose endpoints are both included.
// Node properties: name, ext_id; spec diseases also display_name and
// hetionet_name with name set to the spec's canonical key.
// Throws DiseaseNotFound listing the nearest disease names.
PropertyGraph extract_disease_subgraph(const HetionetData& data, const std::vector<DiseaseSpec>& specs,
                                       int radius = 1);

// Levenshtein distance, used to suggest disease names.
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace hecix::ingest
