#include "hecix/graph/snapshot.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hecix/errors.hpp"

namespace hecix {

namespace {

bool is_unreserved(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '.' || c == '_' || c == '~';
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

Scalar decode_scalar(std::string_view typed) {
  if (typed.size() < 2 || typed[1] != ':') throw std::invalid_argument("missing type tag");
  const char tag = typed[0];
  const std::string payload = percent_decode(typed.substr(2));
  switch (tag) {
    case 's':
      return payload;
    case 'b':
      if (payload == "true") return true;
      if (payload == "false") return false;
      throw std::invalid_argument("bad boolean '" + payload + "'");
    case 'i': {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(payload.data(), payload.data() + payload.size(), v);
      if (ec != std::errc{} || ptr != payload.data() + payload.size() || payload.empty()) {
        throw std::invalid_argument("bad integer '" + payload + "'");
      }
      return v;
    }
    case 'f': {
      double v = 0;
      auto [ptr, ec] = std::from_chars(payload.data(), payload.data() + payload.size(), v);
      if (ec != std::errc{} || ptr != payload.data() + payload.size() || payload.empty()) {
        throw std::invalid_argument("bad float '" + payload + "'");
      }
      return v;
    }
    default:
      throw std::invalid_argument(std::string("unknown type tag '") + tag + "'");
  }
}

std::string encode_scalar(const Scalar& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          return v ? "b:true" : "b:false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return "i:" + std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return "f:" + percent_encode(format_double(v));
        } else {
          return "s:" + percent_encode(v);
        }
      },
      s);
}

}  // namespace

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text) {
    if (is_unreserved(c)) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

std::string percent_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '%') {
      out.push_back(text[i]);
      continue;
    }
    if (i + 2 >= text.size()) throw std::invalid_argument("truncated percent escape");
    const int hi = hex_value(text[i + 1]);
    const int lo = hex_value(text[i + 2]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("bad percent escape");
    out.push_back(static_cast<char>(hi * 16 + lo));
    i += 2;
  }
  return out;
}

std::string encode_properties(const PropertyMap& props) {
  std::string out;
  for (const auto& [key, value] : props) {
    if (!out.empty()) out.push_back('&');
    out += percent_encode(key);
    out.push_back('=');
    out += encode_scalar(value);
  }
  return out;
}

PropertyMap decode_properties(std::string_view text) {
  PropertyMap props;
  if (text.empty()) return props;
  for (auto pair : split(text, '&')) {
    auto eq = pair.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("property without '='");
    std::string key = percent_decode(pair.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("empty property key");
    if (!props.emplace(key, decode_scalar(pair.substr(eq + 1))).second) {
      throw std::invalid_argument("duplicate property key '" + key + "'");
    }
  }
  return props;
}

void write_snapshot(const PropertyGraph& graph, std::ostream& out) {
  out << kSnapshotHeader << '\n';
  for (const auto& n : graph.nodes()) {
    out << "N\t" << to_string(n.id) << '\t' << percent_encode(n.label) << '\t'
        << encode_properties(n.properties) << '\n';
  }
  for (const auto& e : graph.edges()) {
    out << "E\t" << to_string(e.id) << '\t' << percent_encode(e.rel_type) << '\t'
        << to_string(e.source) << '\t' << to_string(e.target) << '\t'
        << encode_properties(e.properties) << '\n';
  }
}

std::string snapshot_string(const PropertyGraph& graph) {
  std::ostringstream out;
  write_snapshot(graph, out);
  return out.str();
}

PropertyGraph read_snapshot(std::istream& in) {
  PropertyGraph graph;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw SnapshotCorrupt(1, "empty snapshot");
  ++line_no;
  if (line != kSnapshotHeader) throw SnapshotCorrupt(1, "missing header '" + std::string(kSnapshotHeader) + "'");

  bool seen_edges = false;
  std::uint64_t last_node = 0;
  std::uint64_t last_edge = 0;
  bool any_node = false;
  bool any_edge = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    try {
      if (fields[0] == "N") {
        if (seen_edges) throw SnapshotCorrupt(line_no, "node record after edge records");
        if (fields.size() != 4) throw SnapshotCorrupt(line_no, "node record needs 4 fields");
        auto id = parse_node_id(fields[1]);
        if (!id) throw SnapshotCorrupt(line_no, "bad node id '" + std::string(fields[1]) + "'");
        if (any_node && id->value <= last_node) throw SnapshotCorrupt(line_no, "node ids not ascending");
        graph.add_node(percent_decode(fields[2]), decode_properties(fields[3]), *id);
        last_node = id->value;
        any_node = true;
      } else if (fields[0] == "E") {
        seen_edges = true;
        if (fields.size() != 6) throw SnapshotCorrupt(line_no, "edge record needs 6 fields");
        auto id = parse_edge_id(fields[1]);
        auto src = parse_node_id(fields[3]);
        auto dst = parse_node_id(fields[4]);
        if (!id || !src || !dst) throw SnapshotCorrupt(line_no, "bad edge identifiers");
        if (any_edge && id->value <= last_edge) throw SnapshotCorrupt(line_no, "edge ids not ascending");
        graph.add_edge(percent_decode(fields[2]), *src, *dst, decode_properties(fields[5]), *id);
        last_edge = id->value;
        any_edge = true;
      } else {
        throw SnapshotCorrupt(line_no, "unknown record type '" + std::string(fields[0]) + "'");
      }
    } catch (const SnapshotCorrupt&) {
      throw;
    } catch (const std::exception& e) {
      throw SnapshotCorrupt(line_no, e.what());
    }
  }
  return graph;
}

void snapshot_save(const PropertyGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open snapshot for writing: " + path.string());
  write_snapshot(graph, out);
  if (!out) throw InputError("failed writing snapshot: " + path.string());
}

PropertyGraph snapshot_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open snapshot: " + path.string());
  return read_snapshot(in);
}

}  // namespace hecix
