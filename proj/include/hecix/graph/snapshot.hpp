#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "hecix/graph/property_graph.hpp"

namespace hecix {

inline constexpr std::string_view kSnapshotHeader = "HECIX-SNAPSHOT v1";

// Line-oriented snapshot:
//   HECIX-SNAPSHOT v1
//   N<TAB>n0<TAB>label<TAB>props
//   E<TAB>e0<TAB>rel_type<TAB>n0<TAB>n1<TAB>props
// Nodes precede edges, each sorted by id. props is `key=t:value&...` with
// keys sorted, t one of s/i/f/b, and key/value percent-encoded.
void write_snapshot(const PropertyGraph& graph, std::ostream& out);
PropertyGraph read_snapshot(std::istream& in);

void snapshot_save(const PropertyGraph& graph, const std::filesystem::path& path);
PropertyGraph snapshot_load(const std::filesystem::path& path);

std::string snapshot_string(const PropertyGraph& graph);

std::string percent_encode(std::string_view text);
// Throws std::invalid_argument on a malformed escape.
std::string percent_decode(std::string_view text);

std::string encode_properties(const PropertyMap& props);
PropertyMap decode_properties(std::string_view text);

}  // namespace hecix
