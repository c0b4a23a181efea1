#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include <nlohmann/json.hpp>

#include "hecix/graph/property_graph.hpp"
#include "hecix/qa/backend.hpp"
#include "hecix/qa/pipeline.hpp"
#include "hecix/qa/templates.hpp"

namespace hecix::service {

struct ServiceConfig {
  std::filesystem::path snapshot;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> template_dir;
  std::optional<std::filesystem::path> mock_fixture;  // use the mock backend instead of the wire backend
  int max_repairs = 2;
  std::size_t context_row_cap = 50;
  std::size_t max_backend_calls = 4;
  std::size_t worker_threads = 8;

  // "host:port", ":port" or "port". Throws InputError.
  void set_bind(const std::string& bind);
  // Port range, snapshot presence, positive limits. Throws InputError.
  void validate() const;
};

// Limits how many backend calls run at once; callers beyond the bound wait.
class BoundedBackend : public qa::LlmBackend {
public:
  BoundedBackend(qa::LlmBackend& inner, std::size_t max_concurrent);

  std::string complete(const qa::CompletionRequest& request) override;
  std::vector<double> embed(const std::string& text) override;
  std::string name() const override { return inner_.name(); }

private:
  qa::LlmBackend& inner_;
  std::counting_semaphore<> slots_;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Request handling over one immutable graph, independent of the transport.
//   POST /ask     {"question": ...}  -> exchange JSON; 422 exhausted repairs, 502 backend failure
//   POST /cypher  {"query": ...}     -> {"columns", "rows", "row_count"}; 400 on rejected queries
//   GET  /schema                     -> schema text
//   GET  /health                     -> {"status", "nodes", "edges"}
//   GET  /stats                      -> ingest report, 404 when none was loaded
class Service {
public:
  Service(const PropertyGraph& graph, qa::LlmBackend& backend, qa::PromptTemplates templates,
          qa::AskOptions options = {}, std::optional<nlohmann::json> stats = std::nullopt,
          std::size_t max_backend_calls = 4);

  Response handle(const std::string& method, const std::string& path, const std::string& body) const;

  const PropertyGraph& graph() const { return graph_; }

private:
  Response ask(const std::string& body) const;
  Response cypher(const std::string& body) const;
  Response health() const;

  const PropertyGraph& graph_;
  std::unique_ptr<BoundedBackend> backend_;
  qa::QaPipeline pipeline_;
  std::optional<nlohmann::json> stats_;
};

nlohmann::json error_json(const std::string& code, const std::string& message);

// Serves until stop() is called from another thread or the process ends.
class HttpServer {
public:
  explicit HttpServer(const Service& service, std::size_t worker_threads = 8);
  ~HttpServer();

  // Binds and blocks. Returns false when the address cannot be bound.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port; returns it, or -1. Follow with listen_after_bind().
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  bool running() const;
  void wait_until_ready() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Loads the snapshot (and its report when present), builds the backend
// from the environment or the mock fixture, and serves. Returns when the
// server stops. Throws InputError on bad configuration.
void run_service(const ServiceConfig& config);

}  // namespace hecix::service
