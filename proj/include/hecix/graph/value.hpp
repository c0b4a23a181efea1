#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hecix {

struct NodeId {
  std::uint64_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

struct EdgeId {
  std::uint64_t value = 0;
  auto operator<=>(const EdgeId&) const = default;
};

std::string to_string(NodeId id);
std::string to_string(EdgeId id);

// "n12" / "e7"; nullopt on anything else.
std::optional<NodeId> parse_node_id(std::string_view text);
std::optional<EdgeId> parse_edge_id(std::string_view text);

// Stored property value. Nodes and edges carry scalars only.
using Scalar = std::variant<bool, std::int64_t, double, std::string>;
using PropertyMap = std::map<std::string, Scalar>;

std::string scalar_to_display(const Scalar& s);

// Shortest round-trip text for a double, always containing '.', 'e', or "inf"/"nan".
std::string format_double(double d);

struct Null {
  bool operator==(const Null&) const = default;
};

struct NodeRef {
  NodeId id;
  bool operator==(const NodeRef&) const = default;
};

struct EdgeRef {
  EdgeId id;
  bool operator==(const EdgeRef&) const = default;
};

// A value flowing through query evaluation: scalars, graph references,
// the absent marker, and lists (produced by collect()).
struct Value {
  using List = std::vector<Value>;
  std::variant<Null, bool, std::int64_t, double, std::string, NodeRef, EdgeRef, List> data;

  Value() = default;
  Value(Null n) : data(n) {}
  Value(bool b) : data(b) {}
  Value(std::int64_t i) : data(i) {}
  Value(int i) : data(static_cast<std::int64_t>(i)) {}
  Value(double d) : data(d) {}
  Value(std::string s) : data(std::move(s)) {}
  Value(const char* s) : data(std::string(s)) {}
  Value(NodeRef n) : data(n) {}
  Value(EdgeRef e) : data(e) {}
  Value(List l) : data(std::move(l)) {}

  static Value from_scalar(const Scalar& s);

  bool is_null() const { return std::holds_alternative<Null>(data); }
  bool is_number() const {
    return std::holds_alternative<std::int64_t>(data) || std::holds_alternative<double>(data);
  }
  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&data);
  }

  bool operator==(const Value&) const = default;
};

}  // namespace hecix
