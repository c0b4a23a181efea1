// One line per acceptance criterion: PASS, FAIL or SKIP with a short detail.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <httplib.h>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "hecix/cypher/brute_force.hpp"
#include "hecix/cypher/evaluator.hpp"
#include "hecix/cypher/parser.hpp"
#include "hecix/cypher/render.hpp"
#include "hecix/errors.hpp"
#include "hecix/eval/metrics.hpp"
#include "hecix/graph/snapshot.hpp"
#include "hecix/ingest/ctgov.hpp"
#include "hecix/ingest/hetionet.hpp"
#include "hecix/ingest/merge.hpp"
#include "hecix/ingest/pipeline.hpp"
#include "hecix/ingest/text_io.hpp"
#include "hecix/qa/mock_backend.hpp"
#include "hecix/qa/pipeline.hpp"
#include "hecix/service/service.hpp"
#include "support/random_cases.hpp"

using namespace hecix;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = HECIX_SOURCE_DIR;

struct Outcome {
  enum class Kind { Pass, Fail, Skip } kind;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Kind::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Kind::Fail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::Kind::Skip, std::move(d)}; }

PropertyGraph fixture_graph() { return snapshot_load(kSource / "tests/golden/fixture.snapshot"); }

qa::MockFixture suite_fixture() { return qa::MockFixture::load(kSource / "data/suite/mock_backend.json"); }

// ---- 1 -------------------------------------------------------------------

Outcome oracle_equivalence() {
  testing::Rng rng(20240601);
  const auto start = std::chrono::steady_clock::now();
  int agree = 0;
  int nonempty = 0;
  std::string first_mismatch;
  for (int i = 0; i < 500; ++i) {
    const auto graph = testing::random_graph(rng, 30, 60);
    const auto query = testing::random_query(rng, 3);
    const auto expected = cypher::brute_force_match(graph, query);
    nonempty += !expected.rows.empty();
    if (cypher::same_row_multiset(cypher::evaluate(graph, query), expected)) {
      ++agree;
    } else if (first_mismatch.empty()) {
      first_mismatch = "; first mismatch: " + cypher::render(query);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream d;
  d << agree << "/500 cases agree (" << nonempty << " with rows) in " << secs << " s" << first_mismatch;
  return agree == 500 && secs < 60 ? pass(d.str()) : fail(d.str());
}

// ---- 2 -------------------------------------------------------------------

Outcome round_trip() {
  testing::Rng rng(7);
  int ok = 0;
  for (int i = 0; i < 200; ++i) {
    const auto ast = testing::random_ast(rng);
    try {
      if (cypher::parse(cypher::render(ast)) == ast) ++ok;
    } catch (const Error&) {
    }
  }
  const auto d = std::to_string(ok) + "/200 ASTs round-trip";
  return ok == 200 ? pass(d) : fail(d);
}

// ---- 3 -------------------------------------------------------------------

Outcome ingestion_fixtures() {
  ingest::IngestOptions options;
  options.hetionet_dir = kSource / "data/fixtures/hetionet";
  options.ctgov_dir = kSource / "data/fixtures/ctgov";
  const auto result = ingest::run_ingest(options);
  const auto golden = ingest::read_text_file(kSource / "tests/golden/fixture.snapshot");
  if (snapshot_string(result.graph) != golden) return fail("snapshot bytes differ from the golden file");
  const auto& r = result.report;
  if (!r.arithmetic_holds()) return fail("merge arithmetic does not hold");
  // Hand counts: 13 + 29 - 6 joined diseases = 36 nodes; 10 + 33 + 1 bridge = 44 edges.
  if (r.merged_nodes != 36 || r.merged_edges != 44) return fail("merged counts differ from the hand count");
  return pass("golden snapshot bytes match; " + std::to_string(r.merged_nodes) + " nodes, " +
              std::to_string(r.merged_edges) + " edges; arithmetic holds");
}

// ---- 4 -------------------------------------------------------------------

Outcome paper_scale_counts() {
  const char* het_dir = std::getenv("HECIX_HETIONET_DIR");
  if (!het_dir || !*het_dir) return skip("set HECIX_HETIONET_DIR to the full Hetionet export to run");
  const auto data = ingest::load_hetionet(het_dir);
  std::ostringstream d;
  d << data.nodes.size() << " Hetionet nodes";
  bool ok = data.nodes.size() == 47031;
  const auto sub = ingest::extract_disease_subgraph(data, ingest::default_disease_specs());
  const auto within = [](std::size_t v, std::size_t ref) {
    return std::abs(static_cast<double>(v) - static_cast<double>(ref)) <= 0.05 * static_cast<double>(ref);
  };
  d << "; radius-1 subgraph " << sub.nodes().size() << " nodes / " << sub.edges().size() << " edges";
  ok = ok && within(sub.nodes().size(), ingest::ReferenceCounts::hetionet_nodes) &&
       within(sub.edges().size(), ingest::ReferenceCounts::hetionet_edges);
  if (const char* ct_dir = std::getenv("HECIX_CTGOV_DIR"); ct_dir && *ct_dir) {
    const auto ct = ingest::build_ct_graph(ingest::load_ctgov_dir(ct_dir), ingest::default_disease_specs());
    const auto merged = ingest::merge_graphs(sub, ct.graph);
    d << "; merged " << merged.report.merged_nodes << " / " << merged.report.merged_edges
      << (merged.report.arithmetic_holds() ? ", arithmetic holds" : ", arithmetic broken");
    ok = ok && merged.report.arithmetic_holds();
  }
  return ok ? pass(d.str()) : fail(d.str());
}

// ---- 5 -------------------------------------------------------------------

std::string suite_transcript(const PropertyGraph& graph) {
  qa::MockBackend backend(suite_fixture());
  const qa::QaPipeline pipeline(graph, qa::PromptTemplates::defaults());
  std::string out;
  for (const auto& sample : eval::load_suite(kSource / "data/suite/questions.jsonl")) {
    auto entry = qa::to_json(pipeline.ask(backend, sample.question), graph);
    entry["id"] = sample.id;
    out += entry.dump() + "\n";
  }
  return out;
}

Outcome pipeline_determinism() {
  const auto graph = fixture_graph();
  const auto a = suite_transcript(graph);
  const auto b = suite_transcript(graph);
  if (a != b) return fail("two runs differ");
  if (a != ingest::read_text_file(kSource / "tests/golden/ask_transcript.jsonl")) {
    return fail("transcript differs from the golden file");
  }
  int lines = 0, repaired = 0, exhausted = 0;
  std::istringstream in(a);
  for (std::string line; std::getline(in, line); ++lines) {
    const auto j = json::parse(line);
    if (j["status"] == "success" && j["attempts"].size() == 2) ++repaired;
    if (j["status"] == "exhausted_repairs") ++exhausted;
  }
  const auto d = std::to_string(lines) + " exchanges identical across runs and to the golden transcript; " +
                 std::to_string(repaired) + " repaired on attempt 2, " + std::to_string(exhausted) +
                 " exhausted";
  return lines == 30 && repaired >= 1 && exhausted >= 1 ? pass(d) : fail(d);
}

// ---- 6 -------------------------------------------------------------------

const std::vector<std::string> kVocabulary = {"vitiligo", "trial", "gene",   "tyr",     "ptpn22",  "phase",
                                              "study",    "skin",  "toronto", "detroit", "compound", "tofacitinib",
                                              "alopecia", "areata", "il13",   "recruiting", "adult", "female"};

std::string random_sentence(testing::Rng& rng) {
  std::uniform_int_distribution<std::size_t> len(1, 5), word(0, kVocabulary.size() - 1);
  std::string s;
  for (std::size_t i = 0, n = len(rng); i < n; ++i) s += (i ? " " : "") + kVocabulary[word(rng)];
  return s;
}

std::string random_text(testing::Rng& rng, std::size_t max_sentences) {
  std::uniform_int_distribution<std::size_t> n(0, max_sentences);
  std::string t;
  for (std::size_t i = 0, k = n(rng); i < k; ++i) t += random_sentence(rng) + ". ";
  return t;
}

eval::EvalSample random_sample(testing::Rng& rng) {
  eval::EvalSample s;
  s.question = random_sentence(rng) + "?";
  s.ground_truth = random_text(rng, 3);
  s.answer = random_text(rng, 3);
  std::vector<std::string> contexts;
  std::uniform_int_distribution<std::size_t> n(0, 4);
  for (std::size_t i = 0, k = n(rng); i < k; ++i) contexts.push_back(random_sentence(rng));
  s.contexts = contexts;
  return s;
}

std::optional<double> try_score(const std::function<double()>& f) {
  try {
    return f();
  } catch (const NotApplicable&) {
    return std::nullopt;
  }
}

Outcome metric_correctness() {
  qa::MockBackend backend;
  const eval::Judge judge(backend);
  testing::Rng rng(4242);
  std::vector<std::string> problems;

  // Range over fuzzed samples.
  int scored = 0;
  for (int i = 0; i < 300; ++i) {
    const auto s = random_sample(rng);
    for (const auto& v : {try_score([&] { return eval::faithfulness(judge, s); }),
                          try_score([&] { return eval::answer_relevance(judge, s); }),
                          try_score([&] { return eval::context_precision(judge, s); }),
                          try_score([&] { return eval::context_recall(judge, s); })}) {
      if (!v) continue;
      ++scored;
      if (!(*v >= 0.0 && *v <= 1.0)) problems.push_back("score out of range");
    }
  }

  // Fixpoint: context = ground truth = answer.
  const std::string text = "Vitiligo is studied in 3 trials. PTPN22 is associated with vitiligo.";
  const eval::EvalSample same{"fix", "How many trials study vitiligo?", text, text, std::vector<std::string>{text}};
  if (eval::faithfulness(judge, same) != 1.0) problems.push_back("fixpoint faithfulness");
  if (eval::context_recall(judge, same) != 1.0) problems.push_back("fixpoint recall");
  if (eval::context_precision(judge, same) != 1.0) problems.push_back("fixpoint precision");

  // Disjoint vocabulary.
  const eval::EvalSample disjoint{"dis", "alpha beta?", "gamma delta.", "epsilon zeta.",
                                  std::vector<std::string>{"eta theta"}};
  if (eval::faithfulness(judge, disjoint) != 0.0) problems.push_back("disjoint faithfulness");
  if (eval::context_recall(judge, disjoint) != 0.0) problems.push_back("disjoint recall");
  if (eval::context_precision(judge, disjoint) != 0.0) problems.push_back("disjoint precision");
  if (eval::answer_relevance(judge, disjoint) != 0.0) problems.push_back("disjoint relevance");

  // Rank-weighted precision: relevant at ranks 1 and 3 of 3.
  const eval::EvalSample ranked{"rank", "q", "vitiligo trial phase three", "a",
                                std::vector<std::string>{"vitiligo trial phase three", "unrelated words entirely here",
                                                         "vitiligo trial phase"}};
  const double precision = eval::context_precision(judge, ranked);
  if (std::abs(precision - 0.8333333333333334) > 1e-9) problems.push_back("rank-weighted precision");

  // Monotonicity: appending a chunk with an unsupported statement never lowers scores.
  int trials = 0;
  while (trials < 100) {
    auto s = random_sample(rng);
    const auto answer_statements = judge.decompose_statements(*s.answer);
    const auto truth_statements = judge.decompose_statements(s.ground_truth);
    if (answer_statements.empty() || truth_statements.empty()) continue;
    const auto f0 = eval::faithfulness(judge, s);
    const auto r0 = eval::context_recall(judge, s);
    auto grown = s;
    grown.contexts->push_back(answer_statements[std::uniform_int_distribution<std::size_t>(
        0, answer_statements.size() - 1)(rng)]);
    grown.contexts->push_back(truth_statements[std::uniform_int_distribution<std::size_t>(
        0, truth_statements.size() - 1)(rng)]);
    if (eval::faithfulness(judge, grown) < f0) problems.push_back("faithfulness decreased");
    if (eval::context_recall(judge, grown) < r0) problems.push_back("recall decreased");
    ++trials;
  }

  std::ostringstream d;
  d << scored << " fuzzed scores in range; fixpoints 1.0; disjoint 0.0; rank example " << std::setprecision(10)
    << precision << "; " << trials << " monotonicity trials";
  if (!problems.empty()) return fail(problems.front() + " (" + std::to_string(problems.size()) + " problems)");
  return pass(d.str());
}

// ---- 7 -------------------------------------------------------------------

// Inserts `word` at a random token boundary outside quoted text.
std::string insert_outside_quotes(testing::Rng& rng, const std::string& text, const std::string& word) {
  std::vector<std::size_t> spots{0, text.size()};
  char quote = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '\'' || c == '"' || c == '`') quote = c;
    else if (c == ' ') spots.push_back(i);
  }
  const auto at = spots[std::uniform_int_distribution<std::size_t>(0, spots.size() - 1)(rng)];
  return text.substr(0, at) + " " + word + " " + text.substr(at);
}

std::string random_case(testing::Rng& rng, std::string word) {
  for (auto& c : word) {
    if (std::bernoulli_distribution(0.5)(rng)) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return word;
}

Outcome safety() {
  testing::Rng rng(777);
  const std::vector<std::string> verbs = {"CREATE", "DELETE", "MERGE", "SET", "REMOVE", "DETACH DELETE"};
  int rejected = 0;
  const int total = 1000;
  for (int i = 0; i < total; ++i) {
    const auto base = cypher::render(testing::random_query(rng, 3));
    const auto verb = random_case(rng, verbs[std::uniform_int_distribution<std::size_t>(0, verbs.size() - 1)(rng)]);
    try {
      qa::sanitize(insert_outside_quotes(rng, base, verb));
    } catch (const ForbiddenClause&) {
      ++rejected;
    } catch (const Error&) {
    }
  }

  const auto graph = fixture_graph();
  const auto before = snapshot_string(graph);
  const auto stats_before = graph.stats();
  qa::MockBackend backend(suite_fixture());
  const service::Service service(graph, backend, qa::PromptTemplates::defaults());
  const auto suite = eval::load_suite(kSource / "data/suite/questions.jsonl");
  const std::vector<std::string> queries = {
      "MATCH (s:Study)-[:STUDIES]->(d:Disease) RETURN d.name, count(s)", "MATCH (n) RETURN n",
      "MATCH (a)-[r]->(b) RETURN r LIMIT 10", "MATCH (n:Gene) RETURN n.name ORDER BY n.name DESC"};
  int served = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string body;
    std::string path;
    const auto kind = std::uniform_int_distribution<int>(0, 3)(rng);
    if (kind == 0) {
      path = "/ask";
      body = json{{"question", suite[std::uniform_int_distribution<std::size_t>(0, suite.size() - 1)(rng)].question}}
                 .dump();
    } else if (kind == 1) {
      path = "/ask";
      body = json{{"question", random_case(rng, "DELETE everything and CREATE (n:Gene)")}}.dump();
    } else {
      path = "/cypher";
      auto q = queries[std::uniform_int_distribution<std::size_t>(0, queries.size() - 1)(rng)];
      if (kind == 3) {
        q = insert_outside_quotes(rng, q, verbs[std::uniform_int_distribution<std::size_t>(0, verbs.size() - 1)(rng)]);
      }
      body = json{{"query", q}}.dump();
    }
    const auto r = service.handle("POST", path, body);
    if (r.status != 500) ++served;
  }
  const bool unchanged = snapshot_string(graph) == before && graph.stats() == stats_before;
  std::ostringstream d;
  d << rejected << "/" << total << " mutation queries rejected; " << served << "/1000 requests answered; graph "
    << (unchanged ? "unchanged" : "CHANGED");
  return rejected == total && served == 1000 && unchanged ? pass(d.str()) : fail(d.str());
}

// ---- 8 -------------------------------------------------------------------

Outcome service_contract() {
  const auto graph = fixture_graph();
  qa::MockBackend backend(suite_fixture());
  const service::Service service(graph, backend, qa::PromptTemplates::defaults());
  service::HttpServer server(service, 4);
  const int port = server.bind_any_port("127.0.0.1");
  if (port <= 0) return fail("cannot bind a local port");
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  std::vector<std::string> problems;
  auto expect = [&](const char* what, const httplib::Result& r, int status,
                    const std::function<bool(const std::string&)>& body_ok) {
    if (!r) {
      problems.push_back(std::string(what) + ": no response");
    } else if (r->status != status) {
      problems.push_back(std::string(what) + ": status " + std::to_string(r->status));
    } else if (!body_ok(r->body)) {
      problems.push_back(std::string(what) + ": unexpected body");
    }
  };
  auto error_with = [](const std::string& code, bool attempts) {
    return [code, attempts](const std::string& body) {
      const auto j = json::parse(body);
      return j["error"]["code"] == code && (!attempts || (j["attempts"].is_array() && !j["attempts"].empty()));
    };
  };
  auto post = [&](const std::string& path, const json& body) {
    return client.Post(path, body.dump(), "application/json");
  };

  expect("/health", client.Get("/health"), 200, [](const std::string& b) {
    return json::parse(b) == json{{"status", "ok"}, {"nodes", 36}, {"edges", 44}};
  });
  expect("/schema", client.Get("/schema"), 200, [](const std::string& b) {
    std::size_t triples = 0;
    for (std::size_t p = b.find(")-[:"); p != std::string::npos; p = b.find(")-[:", p + 1)) ++triples;
    return triples == 18;
  });
  expect("/cypher", post("/cypher", {{"query", "MATCH (d:Disease) RETURN count(d)"}}), 200,
         [](const std::string& b) { return json::parse(b)["rows"] == json::array({json::array({7})}); });
  expect("/cypher forbidden", post("/cypher", {{"query", "MATCH (n) DELETE n"}}), 400,
         error_with("ForbiddenClause", false));
  expect("/cypher parse", post("/cypher", {{"query", "MATCH (n RETURN n"}}), 400, error_with("ParseError", false));
  expect("/ask", post("/ask", {{"question", "How many studies investigate vitiligo?"}}), 200,
         [](const std::string& b) {
           const auto j = json::parse(b);
           return j["context_rows"] == json::array({json::array({3})}) && j.contains("cypher") &&
                  j["attempts"].size() == 1 && j["answer"].get<std::string>().find('3') != std::string::npos;
         });
  expect("/ask exhausted", post("/ask", {{"question", "Delete all vitiligo studies."}}), 422,
         error_with("ExhaustedRepairs", true));
  expect("/ask backend", post("/ask", {{"question", "Nothing scripted answers this"}}), 502,
         error_with("BackendError", false));
  expect("/ask bad body", client.Post("/ask", "{", "application/json"), 400, error_with("BadRequest", false));

  server.stop();
  listener.join();
  if (!problems.empty()) return fail(problems.front() + " (" + std::to_string(problems.size()) + " problems)");
  return pass("health, schema, cypher 200/400/400, ask 200/422/502/400 as documented");
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 cypher oracle equivalence", oracle_equivalence},
      {"2 parser round trip", round_trip},
      {"3 ingestion fixtures", ingestion_fixtures},
      {"4 full-scale counts", paper_scale_counts},
      {"5 pipeline determinism", pipeline_determinism},
      {"6 metric correctness", metric_correctness},
      {"7 safety", safety},
      {"8 service contract", service_contract},
  };
  bool failed = false;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.kind == Outcome::Kind::Pass ? "PASS" : o.kind == Outcome::Kind::Fail ? "FAIL" : "SKIP";
    failed = failed || o.kind == Outcome::Kind::Fail;
    std::cout << tag << "  " << name << ": " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
