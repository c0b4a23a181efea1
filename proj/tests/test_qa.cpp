#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <httplib.h>
#include <sstream>
#include <thread>
#include <nlohmann/json.hpp>

#include "hecix/cypher/parser.hpp"
#include "hecix/cypher/render.hpp"
#include "hecix/cypher/schema.hpp"
#include "hecix/errors.hpp"
#include "hecix/graph/snapshot.hpp"
#include "hecix/qa/backend.hpp"
#include "hecix/qa/http_backend.hpp"
#include "hecix/qa/mock_backend.hpp"
#include "hecix/qa/pipeline.hpp"
#include "hecix/qa/templates.hpp"
#include "hecix/qa/text_utils.hpp"

using namespace hecix;
using namespace hecix::qa;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = HECIX_SOURCE_DIR;

const PropertyGraph& fixture_graph() {
  static const PropertyGraph g = snapshot_load(kSource / "tests/golden/fixture.snapshot");
  return g;
}

const std::string kVitiligoQuestion = "How many studies investigate vitiligo?";
const std::string kVitiligoQuery =
    "MATCH (s:Study)-[:STUDIES]->(d:Disease) WHERE toLower(d.name) = 'vitiligo' RETURN count(s)";

MockFixture scripted(std::vector<MockRule> rules) {
  MockFixture f;
  f.rules = std::move(rules);
  return f;
}

cypher::ResultTable int_table(std::size_t rows) {
  cypher::ResultTable t;
  t.columns = {"x"};
  for (std::size_t i = 0; i < rows; ++i) t.rows.push_back({Value(static_cast<std::int64_t>(i))});
  return t;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class ScopedEnv {
public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    if (value) setenv(name, value, 1);
    else unsetenv(name);
  }
  ~ScopedEnv() {
    if (old_) setenv(name_.c_str(), old_->c_str(), 1);
    else unsetenv(name_.c_str());
  }

private:
  std::string name_;
  std::optional<std::string> old_;
};

}  // namespace

TEST_CASE("sanitize injects a default limit and rejects mutation") {
  CHECK(sanitize("MATCH (n:Gene) RETURN n.name").limit == 50);
  CHECK(sanitize("MATCH (n) RETURN n LIMIT 5").limit == 5);
  try {
    sanitize("MATCH (n) DELETE n");
    FAIL("expected ForbiddenClause");
  } catch (const ForbiddenClause& e) {
    CHECK(e.token() == "DELETE");
  }
  CHECK_THROWS_AS(sanitize("match (n) set n.x = 1"), ForbiddenClause);
  CHECK_THROWS_AS(sanitize("CALL db.labels()"), ForbiddenClause);
  CHECK_THROWS_AS(sanitize("MATCH (n) RETURN n // fine\nLOAD CSV"), ForbiddenClause);
  // Quoted text and names are data, not clauses.
  CHECK(sanitize("MATCH (n) WHERE n.name = 'delete me' RETURN n").limit == 50);
  CHECK(sanitize("MATCH (n:`CREATE`) RETURN n").limit == 50);
  CHECK_THROWS_AS(sanitize("MATCH (n RETURN n"), ParseError);
  CHECK_THROWS_AS(sanitize("MATCH (n) RETURN m"), UnboundVariable);
}

TEST_CASE("code fences and trailing semicolons are stripped") {
  CHECK(strip_code_fence("```cypher\nMATCH (n) RETURN n\n```") == "MATCH (n) RETURN n");
  CHECK(strip_code_fence("```\nMATCH (n) RETURN n;\n```\n") == "MATCH (n) RETURN n");
  CHECK(strip_code_fence("  MATCH (n) RETURN n  ") == "MATCH (n) RETURN n");
}

TEST_CASE("generate_cypher returns the scripted completion") {
  MockBackend backend(scripted({{"how many studies investigate vitiligo", std::nullopt, kVitiligoQuery}}));
  const auto schema = cypher::render_schema(cypher::SchemaDescriptor::of(fixture_graph()));
  CHECK(generate_cypher(backend, PromptTemplates::defaults().cypher_generation, schema, kVitiligoQuestion) ==
        kVitiligoQuery);
  CHECK_THROWS_AS(generate_cypher(backend, PromptTemplates::defaults().cypher_generation, schema, "unknown"),
                  BackendError);
}

TEST_CASE("templates require each placeholder exactly once") {
  CHECK_THROWS_AS(PromptTemplate("t", "no slots", {"question"}), TemplateError);
  CHECK_THROWS_AS(PromptTemplate("t", "{question} {question}", {"question"}), TemplateError);
  const PromptTemplate t("t", "Q: {question} {literal} C: {context}", {"question", "context"});
  // Values are not re-expanded and unknown braces stay literal.
  CHECK(t.fill({{"question", "{context}"}, {"context", "rows"}}) == "Q: {context} {literal} C: rows");
  CHECK_THROWS_AS(t.fill({{"question", "q"}}), TemplateError);

  const auto defaults = PromptTemplates::defaults();
  CHECK(defaults.repair.placeholders().size() == 3);
  CHECK(builtin_template_files().size() == 7);
  for (const auto& [name, text] : builtin_template_files()) {
    std::ifstream in(kSource / "templates" / name);
    std::stringstream file;
    file << in.rdbuf();
    CHECK_MESSAGE(file.str() == text, name);
  }

  const auto dir = fs::temp_directory_path() / "hecix_test_templates";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "repair.txt") << "Fix {bad_query} for {question}: {error}";
  CHECK(PromptTemplates::load(dir).repair.text() == "Fix {bad_query} for {question}: {error}");
  CHECK(PromptTemplates::load(dir).cypher_generation.text() == defaults.cypher_generation.text());
  std::ofstream(dir / "answer_synthesis.txt") << "missing slots";
  CHECK_THROWS_AS(PromptTemplates::load(dir), TemplateError);
}

TEST_CASE("format_context renders and truncates") {
  const auto& g = fixture_graph();
  CHECK(lines_of(format_context(g, int_table(0), 50)).size() == 1);
  CHECK(lines_of(format_context(g, int_table(3), 50)).size() == 4);
  const auto lines = lines_of(format_context(g, int_table(120), 50));
  REQUIRE(lines.size() == 52);
  CHECK(lines.back().ends_with("(+70 more)"));
  CHECK(lines.back() == "\xE2\x80\xA6(+70 more)");

  cypher::ResultTable t;
  t.columns = {"a", "b"};
  t.rows = {{Value(std::string("x\ty")), Value(std::int64_t{2})}};
  CHECK(format_context(g, t, 50) == "a\tb\nx\\ty\t2\n");
  CHECK(context_chunks(g, t, 50) == std::vector<std::string>{"a: x\ty; b: 2"});
}

TEST_CASE("schema text for a two-node graph") {
  PropertyGraph g;
  const auto d = g.add_node("Disease", {{"name", "vitiligo"}});
  const auto x = g.add_node("Gene", {{"name", "TYR"}});
  g.add_edge("ASSOCIATES_DaG", d, x);
  const auto text = cypher::render_schema(cypher::SchemaDescriptor::of(g));
  CHECK(text.find("  Disease(name)\n  Gene(name)\n") != std::string::npos);
  CHECK(text.find("  (:Disease)-[:ASSOCIATES_DaG]->(:Gene)\n") != std::string::npos);
  CHECK(cypher::SchemaDescriptor::of(fixture_graph()).triples.size() == 18);
}

TEST_CASE("ask answers the vitiligo question from the fixture") {
  MockBackend backend(scripted({{kVitiligoQuestion, std::nullopt, kVitiligoQuery}}));
  const auto ex = ask(backend, fixture_graph(), PromptTemplates::defaults(), kVitiligoQuestion);
  REQUIRE(ex.status == QaStatus::Success);
  REQUIRE(ex.context.rows.size() == 1);
  CHECK(ex.context.rows[0][0] == Value(std::int64_t{3}));
  CHECK(ex.answer.find('3') != std::string::npos);
  CHECK(ex.attempts.size() == 1);
  // The executed query re-parses from its rendering.
  CHECK(cypher::parse(ex.executed_cypher) == *ex.executed_query);
  CHECK(ex.executed_query->limit == 50);
}

TEST_CASE("a rejected query is repaired on the second attempt") {
  MockBackend backend(scripted({{"which genes", std::nullopt, "DELETE everything"},
                                {"which genes", Purpose::Repair, "MATCH (g:Gene) RETURN g.name ORDER BY g.name"}}));
  const auto ex = ask(backend, fixture_graph(), PromptTemplates::defaults(), "Which genes are there?");
  REQUIRE(ex.status == QaStatus::Success);
  REQUIRE(ex.attempts.size() == 2);
  CHECK(ex.attempts[0].outcome == "ForbiddenClause");
  CHECK(ex.attempts[1].outcome == "ok");
  CHECK(ex.context.rows.size() == 3);
}

TEST_CASE("unknown labels trigger repair with schema feedback") {
  struct Recording : MockBackend {
    using MockBackend::MockBackend;
    std::string complete(const CompletionRequest& r) override {
      if (r.purpose == Purpose::Repair) repair_error = r.slots.at("error");
      return MockBackend::complete(r);
    }
    std::string repair_error;
  };
  Recording backend(scripted({{"drugs", std::nullopt, "MATCH (c:Drug) RETURN c.name"},
                              {"drugs", Purpose::Repair, "MATCH (c:Compound) RETURN c.name"}}));
  const auto ex = ask(backend, fixture_graph(), PromptTemplates::defaults(), "Which drugs exist?");
  REQUIRE(ex.status == QaStatus::Success);
  CHECK(ex.attempts.size() == 2);
  CHECK(ex.attempts[0].outcome == "UnknownLabel");
  CHECK(backend.repair_error.find("Compound") != std::string::npos);
}

TEST_CASE("repairs are bounded") {
  MockBackend backend(scripted({{"wipe", std::nullopt, "MATCH (n) DELETE n"},
                                {"wipe", Purpose::Repair, "MATCH (n) DETACH DELETE n"}}));
  for (int max_repairs : {0, 1, 2, 5}) {
    AskOptions options;
    options.max_repairs = max_repairs;
    const auto ex = ask(backend, fixture_graph(), PromptTemplates::defaults(), "wipe the graph", options);
    CHECK(ex.status == QaStatus::ExhaustedRepairs);
    CHECK(ex.error_code == "ExhaustedRepairs");
    CHECK(ex.attempts.size() == static_cast<std::size_t>(1 + max_repairs));
    CHECK(ex.answer.empty());
  }
}

TEST_CASE("empty results produce a no-results answer") {
  MockBackend backend(scripted({{"hypothyroidism", std::nullopt,
                                 "MATCH (d:Disease)-[:ASSOCIATES_DaG]->(g:Gene) WHERE d.name = 'hypothyroidism' "
                                 "RETURN g.name"}}));
  const auto ex = ask(backend, fixture_graph(), PromptTemplates::defaults(), "Genes for hypothyroidism?");
  REQUIRE(ex.status == QaStatus::Success);
  CHECK(ex.context.rows.empty());
  CHECK(ex.answer == "No results were found for this question.");
}

TEST_CASE("backend failures are reported, not thrown") {
  MockBackend backend;
  const auto ex = ask(backend, fixture_graph(), PromptTemplates::defaults(), "anything");
  CHECK(ex.status == QaStatus::BackendFailure);
  CHECK(ex.error_code == "BackendError");
  CHECK(ex.answer.empty());
  CHECK(to_json(ex, fixture_graph())["error"]["code"] == "BackendError");
}

TEST_CASE("mock exchanges are deterministic and leave the graph unchanged") {
  const auto fixture = MockFixture::load(kSource / "data/suite/mock_backend.json");
  MockBackend backend(fixture);
  const auto& g = fixture_graph();
  const auto before = snapshot_string(g);
  for (const auto& rule : fixture.rules) {
    const auto a = to_json(ask(backend, g, PromptTemplates::defaults(), rule.match), g);
    const auto b = to_json(ask(backend, g, PromptTemplates::defaults(), rule.match), g);
    CHECK(a == b);
  }
  CHECK(snapshot_string(g) == before);
}

TEST_CASE("mock judge behaviors") {
  MockBackend backend;
  CompletionRequest r;
  r.purpose = Purpose::Statements;
  r.slots = {{"text", "Vitiligo is studied in 3 trials. JAK inhibitors are used."}};
  CHECK(backend.complete(r) == "Vitiligo is studied in 3 trials\nJAK inhibitors are used");

  r.purpose = Purpose::Support;
  r.slots = {{"statement", "TYR"}, {"context", "gene: tyr"}};
  CHECK(backend.complete(r) == "yes");
  r.slots = {{"statement", "IL13"}, {"context", "gene: tyr"}};
  CHECK(backend.complete(r) == "no");

  r.purpose = Purpose::Questions;
  r.slots = {{"answer", "gene is TYR. More."}, {"n", "3"}};
  CHECK(backend.complete(r) == "gene is tyr?\nis tyr gene?\ntyr gene is?");

  const auto v = backend.embed("Gene gene TYR");
  double norm = 0;
  for (double x : v) norm += x * x;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(backend.embed("") == std::vector<double>(kMockEmbeddingDims, 0.0));
}

TEST_CASE("backend configuration comes from the environment") {
  ScopedEnv endpoint("HECIX_LLM_ENDPOINT", "http://127.0.0.1:9/v1");
  ScopedEnv model("HECIX_LLM_MODEL", "test-model");
  ScopedEnv key("HECIX_LLM_KEY", "secret-token");
  ScopedEnv timeout("HECIX_LLM_TIMEOUT_S", "2.5");
  const auto c = BackendConfig::from_env();
  CHECK(c.endpoint == "http://127.0.0.1:9/v1");
  CHECK(c.credential == "secret-token");
  CHECK(c.timeout == std::chrono::milliseconds(2500));
  {
    ScopedEnv bad("HECIX_LLM_TIMEOUT_S", "soon");
    CHECK_THROWS_AS(BackendConfig::from_env(), InputError);
  }
  {
    ScopedEnv none("HECIX_LLM_ENDPOINT", nullptr);
    CHECK_THROWS_AS(BackendConfig::from_env(), InputError);
  }
}

TEST_CASE("wire backend: payloads, retries and failures") {
  httplib::Server server;
  std::atomic<int> calls{0};
  std::string seen_auth;
  json seen_body;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    const int n = ++calls;
    seen_auth = req.get_header_value("Authorization");
    seen_body = json::parse(req.body);
    if (n == 1) {
      res.status = 503;
      return;
    }
    const json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", "MATCH (n) RETURN n"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  server.Post("/v1/embeddings", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"data":[{"embedding":[0.5,0.25]}]})", "application/json");
  });
  server.Post("/bad/chat/completions", [](const httplib::Request&, httplib::Response& res) { res.status = 400; });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  BackendConfig config;
  config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  config.model = "m";
  config.credential = "secret-token";
  config.timeout = std::chrono::milliseconds(2000);
  HttpBackend backend(config);
  CompletionRequest r;
  r.system = "sys";
  r.user = "usr";
  CHECK(backend.complete(r) == "MATCH (n) RETURN n");
  CHECK(calls == 2);
  CHECK(seen_auth == "Bearer secret-token");
  CHECK(seen_body["messages"][1]["content"] == "usr");
  CHECK(seen_body["temperature"] == 0);
  CHECK(backend.embed("x") == std::vector<double>{0.5, 0.25});

  config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/bad";
  try {
    HttpBackend(config).complete(r);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(std::string(e.what()).find("400") != std::string::npos);
    CHECK(std::string(e.what()).find("secret-token") == std::string::npos);
  }
  server.stop();
  t.join();

  config.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  config.max_retries = 0;
  config.timeout = std::chrono::milliseconds(500);
  const auto start = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(HttpBackend(config).complete(r), BackendError);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
}
