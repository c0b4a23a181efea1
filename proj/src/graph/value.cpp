#include "hecix/graph/value.hpp"

#include <charconv>
#include <cmath>

namespace hecix {

namespace {

template <typename Id>
std::optional<Id> parse_prefixed(std::string_view text, char prefix) {
  if (text.size() < 2 || text.front() != prefix) return std::nullopt;
  std::uint64_t v = 0;
  auto digits = text.substr(1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  if (digits.size() > 1 && digits.front() == '0') return std::nullopt;
  return Id{v};
}

}  // namespace

std::string to_string(NodeId id) { return "n" + std::to_string(id.value); }
std::string to_string(EdgeId id) { return "e" + std::to_string(id.value); }

std::optional<NodeId> parse_node_id(std::string_view text) {
  return parse_prefixed<NodeId>(text, 'n');
}

std::optional<EdgeId> parse_edge_id(std::string_view text) {
  return parse_prefixed<EdgeId>(text, 'e');
}

std::string format_double(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string out(buf, ptr);
  if (out.find_first_of(".eE") == std::string::npos) out += ".0";
  return out;
}

std::string scalar_to_display(const Scalar& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else {
          return v;
        }
      },
      s);
}

Value Value::from_scalar(const Scalar& s) {
  return std::visit([](const auto& v) { return Value(v); }, s);
}

}  // namespace hecix
