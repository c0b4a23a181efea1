#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hecix/cypher/evaluator.hpp"
#include "hecix/cypher/parser.hpp"
#include "hecix/errors.hpp"
#include "hecix/eval/metrics.hpp"
#include "hecix/graph/snapshot.hpp"
#include "hecix/ingest/merge.hpp"
#include "hecix/ingest/pipeline.hpp"
#include "hecix/qa/http_backend.hpp"
#include "hecix/qa/mock_backend.hpp"
#include "hecix/qa/pipeline.hpp"
#include "hecix/service/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kMissingInput = 2,
  kParseError = 3,
  kBackendError = 4,
  kExhaustedRepairs = 5,
};

int exit_code_for(const hecix::Error& e) {
  const auto& code = e.code();
  if (code == "InputError" || code == "MissingField" || code == "SnapshotCorrupt") return kMissingInput;
  if (code == "ParseError" || code == "LexError" || code == "UnboundVariable" || code == "ForbiddenClause") {
    return kParseError;
  }
  if (code == "BackendError" || code == "BackendTimeout") return kBackendError;
  return kFailure;
}

void require_exists(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) throw hecix::InputError(what + " not found: " + path.string());
}

hecix::PropertyGraph load_graph(const fs::path& snapshot) {
  require_exists(snapshot, "snapshot");
  return hecix::snapshot_load(snapshot);
}

std::unique_ptr<hecix::qa::LlmBackend> make_backend(const std::string& mock_fixture) {
  if (!mock_fixture.empty()) {
    require_exists(mock_fixture, "mock backend fixture");
    return std::make_unique<hecix::qa::MockBackend>(hecix::qa::MockFixture::load(mock_fixture));
  }
  return std::make_unique<hecix::qa::HttpBackend>(hecix::qa::BackendConfig::from_env());
}

hecix::qa::PromptTemplates load_templates(const std::string& dir) {
  if (dir.empty()) return hecix::qa::PromptTemplates::defaults();
  require_exists(dir, "template directory");
  return hecix::qa::PromptTemplates::load(dir);
}

struct IngestArgs {
  std::string hetionet, ctgov_dir, diseases, nct_list, snapshot;
  bool ctgov_fetch = false;
  int radius = 1;
  std::size_t per_disease = 200;
};

int cmd_ingest(const IngestArgs& a) {
  require_exists(a.hetionet, "Hetionet directory");
  hecix::ingest::IngestOptions options;
  options.hetionet_dir = a.hetionet;
  if (!a.ctgov_dir.empty()) {
    require_exists(a.ctgov_dir, "ClinicalTrials.gov directory");
    options.ctgov_dir = a.ctgov_dir;
  }
  options.ctgov_fetch = a.ctgov_fetch;
  if (!a.diseases.empty()) {
    require_exists(a.diseases, "disease spec file");
    options.diseases = a.diseases;
  }
  if (!a.nct_list.empty()) {
    require_exists(a.nct_list, "NCT list");
    options.nct_list = a.nct_list;
  }
  options.radius = a.radius;
  options.fetch.per_disease = a.per_disease;

  const auto result = hecix::ingest::run_ingest(options);
  hecix::ingest::write_outputs(result, a.snapshot);
  std::cout << hecix::ingest::to_json(result.report).dump(2) << '\n';
  return kOk;
}

struct QueryArgs {
  std::string snapshot, query, format = "tsv";
};

int cmd_query(const QueryArgs& a) {
  const auto graph = load_graph(a.snapshot);
  const auto ast = hecix::cypher::parse(a.query);
  const auto table = hecix::cypher::evaluate(graph, ast);
  if (a.format == "json") {
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::array();
      for (const auto& v : row) r.push_back(hecix::qa::value_to_json(graph, v));
      rows.push_back(std::move(r));
    }
    std::cout << json{{"columns", table.columns}, {"rows", rows}}.dump(2) << '\n';
  } else {
    std::cout << hecix::qa::format_context(graph, table, table.rows.size());
  }
  return kOk;
}

struct AskArgs {
  std::string snapshot, question, suite, mock_backend, templates;
  bool trace = false;
  bool timings = false;
  int max_repairs = 2;
  std::size_t context_row_cap = 50;
};

int status_exit(hecix::qa::QaStatus status) {
  switch (status) {
    case hecix::qa::QaStatus::Success: return kOk;
    case hecix::qa::QaStatus::ExhaustedRepairs: return kExhaustedRepairs;
    case hecix::qa::QaStatus::BackendFailure: return kBackendError;
  }
  return kFailure;
}

int cmd_ask(const AskArgs& a) {
  if (a.question.empty() == a.suite.empty()) throw hecix::InputError("give either a question or --suite");
  const auto graph = load_graph(a.snapshot);
  auto backend = make_backend(a.mock_backend);
  hecix::qa::AskOptions options;
  options.max_repairs = a.max_repairs;
  options.context_row_cap = a.context_row_cap;
  const hecix::qa::QaPipeline pipeline(graph, load_templates(a.templates), options);

  if (!a.suite.empty()) {
    require_exists(a.suite, "suite");
    // One transcript line per question, in suite order.
    for (const auto& sample : hecix::eval::load_suite(a.suite)) {
      auto entry = hecix::qa::to_json(pipeline.ask(*backend, sample.question), graph, a.timings);
      entry["id"] = sample.id;
      std::cout << entry.dump() << '\n';
    }
    return kOk;
  }

  const auto ex = pipeline.ask(*backend, a.question);
  if (a.trace) {
    std::cout << hecix::qa::to_json(ex, graph, a.timings).dump(2) << '\n';
  } else if (ex.status == hecix::qa::QaStatus::Success) {
    std::cout << ex.answer << '\n';
  }
  if (ex.status != hecix::qa::QaStatus::Success) {
    std::cerr << "hecix: " << ex.error_code << ": " << ex.error_message << '\n';
  }
  return status_exit(ex.status);
}

struct EvalArgs {
  std::string snapshot, suite, out, mock_backend, templates;
  std::size_t parallelism = 4;
  int max_repairs = 2;
  std::size_t context_row_cap = 50;
};

int cmd_eval(const EvalArgs& a) {
  require_exists(a.suite, "suite");
  const auto samples = hecix::eval::load_suite(a.suite);
  auto backend = make_backend(a.mock_backend);
  const auto judge_templates =
      a.templates.empty() ? hecix::qa::JudgeTemplates::defaults() : hecix::qa::JudgeTemplates::load(a.templates);
  hecix::eval::SuiteOptions suite_options;
  suite_options.parallelism = a.parallelism;

  std::optional<hecix::PropertyGraph> graph;
  std::optional<hecix::qa::QaPipeline> pipeline;
  if (!a.snapshot.empty()) {
    graph = load_graph(a.snapshot);
    hecix::qa::AskOptions options;
    options.max_repairs = a.max_repairs;
    options.context_row_cap = a.context_row_cap;
    pipeline.emplace(*graph, load_templates(a.templates), options);
  }
  const auto report = hecix::eval::evaluate_suite(*backend, samples, pipeline ? &*pipeline : nullptr,
                                                  judge_templates, suite_options);
  if (!a.out.empty()) hecix::eval::write_report(a.out, report);
  hecix::eval::write_metrics_tsv(std::cout, report);
  return kOk;
}

struct ServeArgs {
  std::string snapshot, bind = "127.0.0.1:8080", templates, mock_backend;
  int max_repairs = 2;
  std::size_t context_row_cap = 50;
  std::size_t max_backend_calls = 4;
  std::size_t threads = 8;
};

int cmd_serve(const ServeArgs& a) {
  hecix::service::ServiceConfig config;
  config.snapshot = a.snapshot;
  config.set_bind(a.bind);
  if (!a.templates.empty()) config.template_dir = a.templates;
  if (!a.mock_backend.empty()) config.mock_fixture = a.mock_backend;
  config.max_repairs = a.max_repairs;
  config.context_row_cap = a.context_row_cap;
  config.max_backend_calls = a.max_backend_calls;
  config.worker_threads = a.threads;
  hecix::service::run_service(config);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("hecix"));
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Disease knowledge graph: ingest, query, question answering and evaluation"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Build a snapshot from Hetionet and trial records");
  ingest_cmd->add_option("--hetionet", ingest.hetionet, "Directory with Hetionet nodes and edges files")->required();
  auto* ct_dir = ingest_cmd->add_option("--ctgov-dir", ingest.ctgov_dir, "Directory of study JSON documents");
  auto* ct_fetch = ingest_cmd->add_flag("--ctgov-fetch", ingest.ctgov_fetch, "Fetch studies from the registry API");
  ct_dir->excludes(ct_fetch);
  ct_fetch->excludes(ct_dir);
  ingest_cmd->add_option("--diseases", ingest.diseases, "Disease spec file (default: built-in six diseases)");
  ingest_cmd->add_option("--radius", ingest.radius, "Hetionet neighborhood radius")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  ingest_cmd->add_option("--nct-list", ingest.nct_list, "File of NCT ids to use");
  ingest_cmd->add_option("--per-disease", ingest.per_disease, "Studies fetched per disease")->capture_default_str();
  ingest_cmd->add_option("--snapshot", ingest.snapshot, "Output snapshot path")->required();

  QueryArgs query;
  auto* query_cmd = app.add_subcommand("query", "Run a Cypher query against a snapshot");
  query_cmd->add_option("--snapshot", query.snapshot, "Snapshot path")->required();
  query_cmd->add_option("query", query.query, "Cypher query text")->required();
  query_cmd->add_option("--format", query.format, "Output format")
      ->check(CLI::IsMember({"tsv", "json"}))
      ->capture_default_str();

  AskArgs ask;
  auto* ask_cmd = app.add_subcommand("ask", "Answer a question through the LLM pipeline");
  ask_cmd->add_option("--snapshot", ask.snapshot, "Snapshot path")->required();
  ask_cmd->add_option("question", ask.question, "Question text");
  ask_cmd->add_option("--suite", ask.suite, "Ask every question of a suite file; prints one JSON line each");
  ask_cmd->add_option("--mock-backend", ask.mock_backend, "Mock backend fixture file");
  ask_cmd->add_option("--templates", ask.templates, "Prompt template directory");
  ask_cmd->add_flag("--trace", ask.trace, "Print the full exchange as JSON");
  ask_cmd->add_flag("--timings", ask.timings, "Include stage timings in JSON output");
  ask_cmd->add_option("--max-repairs", ask.max_repairs, "Repair attempts")->capture_default_str();
  ask_cmd->add_option("--context-row-cap", ask.context_row_cap, "Rows handed to answer synthesis")
      ->capture_default_str();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a question suite");
  eval_cmd->add_option("--suite", eval.suite, "Suite file (JSON lines)")->required();
  eval_cmd->add_option("--snapshot", eval.snapshot, "Answer questions live against this snapshot");
  eval_cmd->add_option("--out", eval.out, "Directory for metrics.tsv, samples.tsv and summary.json");
  eval_cmd->add_option("--mock-backend", eval.mock_backend, "Mock backend fixture file");
  eval_cmd->add_option("--templates", eval.templates, "Template directory (prompts and judge prompts)");
  eval_cmd->add_option("--parallelism", eval.parallelism, "Samples scored at once")->capture_default_str();
  eval_cmd->add_option("--max-repairs", eval.max_repairs, "Repair attempts")->capture_default_str();
  eval_cmd->add_option("--context-row-cap", eval.context_row_cap, "Rows handed to answer synthesis")
      ->capture_default_str();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the pipeline over HTTP");
  serve_cmd->add_option("--snapshot", serve.snapshot, "Snapshot path")->required();
  serve_cmd->add_option("--bind", serve.bind, "Listen address host:port")->capture_default_str();
  serve_cmd->add_option("--templates", serve.templates, "Prompt template directory");
  serve_cmd->add_option("--mock-backend", serve.mock_backend, "Mock backend fixture file");
  serve_cmd->add_option("--max-repairs", serve.max_repairs, "Repair attempts")->capture_default_str();
  serve_cmd->add_option("--context-row-cap", serve.context_row_cap, "Rows handed to answer synthesis")
      ->capture_default_str();
  serve_cmd->add_option("--max-backend-calls", serve.max_backend_calls, "Concurrent backend calls")
      ->capture_default_str();
  serve_cmd->add_option("--threads", serve.threads, "Request worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kMissingInput;
  }
  if (verbose) spdlog::set_level(spdlog::level::info);

  try {
    if (*ingest_cmd) {
      if (ingest.ctgov_dir.empty() && !ingest.ctgov_fetch) {
        throw hecix::InputError("give --ctgov-dir or --ctgov-fetch");
      }
      return cmd_ingest(ingest);
    }
    if (*query_cmd) return cmd_query(query);
    if (*ask_cmd) return cmd_ask(ask);
    if (*eval_cmd) return cmd_eval(eval);
    if (*serve_cmd) return cmd_serve(serve);
  } catch (const hecix::Error& e) {
    std::cerr << "hecix: " << e.code() << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "hecix: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
