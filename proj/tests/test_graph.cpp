#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "hecix/errors.hpp"
#include "hecix/graph/property_graph.hpp"
#include "hecix/graph/snapshot.hpp"

using namespace hecix;

namespace {

// Five nodes, four edges:
//   tofacitinib -TREATS_CtD-> alopecia, vitiligo -ASSOCIATES_DaG-> TYR,
//   vitiligo -ASSOCIATES_DaG-> PTPN22, alopecia -ASSOCIATES_DaG-> PTPN22
PropertyGraph five_node_fixture() {
  PropertyGraph g;
  const auto vitiligo = g.add_node("Disease", {{"name", "vitiligo"}, {"ext_id", "DOID:12306"}});
  const auto alopecia = g.add_node("Disease", {{"name", "alopecia areata"}, {"ext_id", "DOID:986"}});
  const auto tyr = g.add_node("Gene", {{"name", "TYR"}, {"ext_id", std::int64_t{7299}}});
  const auto ptpn22 = g.add_node("Gene", {{"name", "PTPN22"}, {"ext_id", std::int64_t{26191}}});
  const auto tofa = g.add_node("Compound", {{"name", "Tofacitinib"}, {"score", 0.75}, {"approved", true}});
  g.add_edge("TREATS_CtD", tofa, alopecia);
  g.add_edge("ASSOCIATES_DaG", vitiligo, tyr);
  g.add_edge("ASSOCIATES_DaG", vitiligo, ptpn22, {{"source", "GWAS Catalog"}});
  g.add_edge("ASSOCIATES_DaG", alopecia, ptpn22);
  return g;
}

std::vector<NodeId> linear_scan(const PropertyGraph& g, const std::string& label, const std::string& key,
                                const Scalar& value) {
  std::vector<NodeId> out;
  for (const auto& n : g.nodes()) {
    if (n.label != label) continue;
    const auto it = n.properties.find(key);
    if (it != n.properties.end() && scalars_equal(it->second, value)) out.push_back(n.id);
  }
  return out;
}

}  // namespace

TEST_CASE("add_node assigns monotonic ids and stores records") {
  PropertyGraph g;
  const auto id = g.add_node("Disease", {{"name", "vitiligo"}});
  CHECK(to_string(id) == "n0");
  CHECK(g.node(id).label == "Disease");
  CHECK(g.add_node("Gene", {}) == NodeId{1});
  CHECK_THROWS_AS(g.add_node("", {{"name", "x"}}), EmptyLabel);
}

TEST_CASE("explicit ids collide") {
  PropertyGraph g;
  g.add_node("A", {}, NodeId{5});
  CHECK_THROWS_AS(g.add_node("A", {}, NodeId{5}), IdCollision);
  CHECK(g.add_node("A", {}) == NodeId{6});
}

TEST_CASE("add_edge checks endpoints and updates adjacency") {
  PropertyGraph g;
  const auto c = g.add_node("Compound", {{"name", "Tofacitinib"}});
  const auto d = g.add_node("Disease", {{"name", "alopecia areata"}});
  g.add_edge("TREATS_CtD", c, d);
  CHECK(g.neighbors(c, Direction::Out, "TREATS_CtD") == std::set<NodeId>{d});
  CHECK(g.neighbors(c, Direction::Out, "OTHER").empty());
  CHECK_THROWS_AS(g.add_edge("X", c, NodeId{99}), DanglingEndpoint);
  CHECK_THROWS_AS(g.add_edge("", c, d), EmptyLabel);
  CHECK(g.stats().edges == 1);
}

TEST_CASE("neighbors by direction") {
  PropertyGraph g;
  const auto a = g.add_node("X", {});
  CHECK(g.neighbors(a, Direction::Both).empty());
  const auto b = g.add_node("X", {});
  const auto c = g.add_node("X", {});
  g.add_edge("R", a, b);
  g.add_edge("R", b, c);
  CHECK(g.neighbors(b, Direction::In) == std::set<NodeId>{a});
  CHECK(g.neighbors(b, Direction::Out) == std::set<NodeId>{c});
  CHECK(g.neighbors(b, Direction::Both) == std::set<NodeId>{a, c});
  CHECK_THROWS_AS(g.neighbors(NodeId{42}, Direction::Both), NotFound);
}

TEST_CASE("five-node fixture counts and gene neighbors") {
  const auto g = five_node_fixture();
  CHECK(g.stats() == GraphStats{5, 4});
  const auto vitiligo = g.find_nodes("Disease", std::pair<std::string, Scalar>{"name", "vitiligo"});
  REQUIRE(vitiligo.size() == 1);
  // Hand-listed: vitiligo is associated with TYR (n2) and PTPN22 (n3).
  CHECK(g.neighbors(vitiligo[0], Direction::Out, "ASSOCIATES_DaG") == std::set<NodeId>{NodeId{2}, NodeId{3}});
  CHECK(g.find_nodes("Disease").size() == 2);
  CHECK(g.find_nodes("Nope").empty());
  CHECK(g.check_integrity().empty());
}

TEST_CASE("index lookups equal a linear scan on random graphs") {
  std::mt19937_64 rng(7);
  PropertyGraph g;
  const std::vector<std::string> labels{"Disease", "Gene", "Compound"};
  for (int i = 0; i < 1000; ++i) {
    PropertyMap props;
    props["name"] = "v" + std::to_string(rng() % 40);
    if (rng() % 2) props["ext_id"] = static_cast<std::int64_t>(rng() % 25);
    else if (rng() % 3 == 0) props["ext_id"] = static_cast<double>(rng() % 25);
    g.add_node(labels[rng() % labels.size()], std::move(props));
  }
  for (int i = 0; i < 100; ++i) {
    g.set_node_property(NodeId{rng() % 1000}, "name", "v" + std::to_string(rng() % 40));
  }
  for (const auto& label : labels) {
    for (int v = 0; v < 40; ++v) {
      const Scalar value = "v" + std::to_string(v);
      CHECK(g.find_nodes(label, std::pair<std::string, Scalar>{"name", value}) == linear_scan(g, label, "name", value));
    }
    for (int v = 0; v < 25; ++v) {
      const Scalar as_int = static_cast<std::int64_t>(v);
      const Scalar as_float = static_cast<double>(v);
      CHECK(g.find_nodes(label, std::pair<std::string, Scalar>{"ext_id", as_int}) == linear_scan(g, label, "ext_id", as_int));
      CHECK(g.find_nodes(label, std::pair<std::string, Scalar>{"ext_id", as_float}) == linear_scan(g, label, "ext_id", as_float));
    }
  }
  CHECK(g.check_integrity().empty());
}

TEST_CASE("snapshot round trip") {
  SUBCASE("empty graph") {
    const PropertyGraph g;
    const auto text = snapshot_string(g);
    CHECK(text == "HECIX-SNAPSHOT v1\n");
    std::istringstream in(text);
    CHECK(read_snapshot(in).stats() == GraphStats{0, 0});
  }
  SUBCASE("five-node fixture") {
    const auto g = five_node_fixture();
    const auto text = snapshot_string(g);
    std::istringstream in(text);
    const auto loaded = read_snapshot(in);
    CHECK(loaded.nodes() == g.nodes());
    CHECK(loaded.edges() == g.edges());
    CHECK(snapshot_string(loaded) == text);
    CHECK(snapshot_string(g) == text);
    CHECK(loaded.check_integrity().empty());
  }
  SUBCASE("hand-written canonical lines") {
    PropertyGraph g;
    g.add_node("Disease", {{"name", "atopic dermatitis"}, {"n", std::int64_t{-3}}, {"ok", false}, {"x", 1.5}});
    g.add_node("Odd Label", {{"k&=%", "a\tb\nc"}});
    g.add_edge("R", NodeId{0}, NodeId{1}, {{"w", 2.0}});
    CHECK(snapshot_string(g) ==
          "HECIX-SNAPSHOT v1\n"
          "N\tn0\tDisease\tn=i:-3&name=s:atopic%20dermatitis&ok=b:false&x=f:1.5\n"
          "N\tn1\tOdd%20Label\tk%26%3D%25=s:a%09b%0Ac\n"
          "E\te0\tR\tn0\tn1\tw=f:2.0\n");
  }
  SUBCASE("file save and load") {
    const auto path = std::filesystem::temp_directory_path() / "hecix_graph_test.snapshot";
    snapshot_save(five_node_fixture(), path);
    CHECK(snapshot_load(path).stats() == GraphStats{5, 4});
    std::filesystem::remove(path);
  }
}

TEST_CASE("corrupt snapshots report the line") {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_snapshot(in);
    } catch (const SnapshotCorrupt& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("") == 1);
  CHECK(line_of("HECIX-SNAPSHOT v2\n") == 1);
  CHECK(line_of("HECIX-SNAPSHOT v1\nN\tn0\tA\t\nN\tn0\tA\t\n") == 3);
  CHECK(line_of("HECIX-SNAPSHOT v1\nN\tn0\tA\tname=q:x\n") == 2);
  CHECK(line_of("HECIX-SNAPSHOT v1\nN\tn0\tA\t\nE\te0\tR\tn0\tn9\t\n") == 3);
  CHECK(line_of("HECIX-SNAPSHOT v1\nE\te0\tR\tn0\tn0\t\nN\tn0\tA\t\n") == 2);
  CHECK(line_of("HECIX-SNAPSHOT v1\nN\tn0\tA\n") == 2);
  CHECK(line_of("HECIX-SNAPSHOT v1\nN\tn0\tA\tk=i:12x\n") == 2);
}
