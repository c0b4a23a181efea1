#include "hecix/service/service.hpp"

#include <fstream>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "hecix/cypher/evaluator.hpp"
#include "hecix/cypher/render.hpp"
#include "hecix/cypher/schema.hpp"
#include "hecix/errors.hpp"
#include "hecix/graph/snapshot.hpp"
#include "hecix/ingest/pipeline.hpp"
#include "hecix/qa/http_backend.hpp"
#include "hecix/qa/mock_backend.hpp"

namespace hecix::service {

using nlohmann::json;

void ServiceConfig::set_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  std::string port_text = bind;
  if (colon != std::string::npos) {
    if (colon > 0) host = bind.substr(0, colon);
    port_text = bind.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    port = std::stoi(port_text, &used);
    if (used != port_text.size()) throw std::invalid_argument(port_text);
  } catch (const std::logic_error&) {
    throw InputError("bad bind address: " + bind);
  }
}

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw InputError("port out of range: " + std::to_string(port));
  if (!std::filesystem::is_regular_file(snapshot)) throw InputError("snapshot not found: " + snapshot.string());
  if (max_repairs < 0) throw InputError("max repairs must not be negative");
  if (context_row_cap == 0) throw InputError("context row cap must be positive");
  if (max_backend_calls == 0 || worker_threads == 0) throw InputError("concurrency limits must be positive");
}

BoundedBackend::BoundedBackend(qa::LlmBackend& inner, std::size_t max_concurrent)
    : inner_(inner), slots_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, max_concurrent))) {}

namespace {

class SlotGuard {
public:
  explicit SlotGuard(std::counting_semaphore<>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

private:
  std::counting_semaphore<>& s_;
};

Response json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

Response error_response(int status, const std::string& code, const std::string& message) {
  return json_response(status, error_json(code, message));
}

std::optional<json> parse_body(const std::string& body) {
  try {
    auto j = json::parse(body);
    if (j.is_object()) return j;
  } catch (const json::exception&) {
  }
  return std::nullopt;
}

}  // namespace

std::string BoundedBackend::complete(const qa::CompletionRequest& request) {
  SlotGuard guard(slots_);
  return inner_.complete(request);
}

std::vector<double> BoundedBackend::embed(const std::string& text) {
  SlotGuard guard(slots_);
  return inner_.embed(text);
}

json error_json(const std::string& code, const std::string& message) {
  return json{{"error", {{"code", code}, {"message", message}}}};
}

Service::Service(const PropertyGraph& graph, qa::LlmBackend& backend, qa::PromptTemplates templates,
                 qa::AskOptions options, std::optional<json> stats, std::size_t max_backend_calls)
    : graph_(graph),
      backend_(std::make_unique<BoundedBackend>(backend, max_backend_calls)),
      pipeline_(graph, std::move(templates), options),
      stats_(std::move(stats)) {}

Response Service::handle(const std::string& method, const std::string& path, const std::string& body) const {
  try {
    if (path == "/ask") return method == "POST" ? ask(body) : error_response(405, "MethodNotAllowed", "use POST");
    if (path == "/cypher") return method == "POST" ? cypher(body) : error_response(405, "MethodNotAllowed", "use POST");
    if (path == "/schema") {
      if (method != "GET") return error_response(405, "MethodNotAllowed", "use GET");
      return {200, "text/plain; charset=utf-8", pipeline_.schema_text()};
    }
    if (path == "/health") return method == "GET" ? health() : error_response(405, "MethodNotAllowed", "use GET");
    if (path == "/stats") {
      if (method != "GET") return error_response(405, "MethodNotAllowed", "use GET");
      if (!stats_) return error_response(404, "NotFound", "no ingest report was loaded");
      return json_response(200, *stats_);
    }
    return error_response(404, "NotFound", "no such endpoint: " + path);
  } catch (const std::exception& e) {
    spdlog::error("request {} {} failed: {}", method, path, e.what());
    return error_response(500, "InternalError", e.what());
  }
}

Response Service::ask(const std::string& body) const {
  const auto j = parse_body(body);
  if (!j || !j->contains("question") || !(*j)["question"].is_string() ||
      (*j)["question"].get<std::string>().empty()) {
    return error_response(400, "BadRequest", "body must be a JSON object with a non-empty \"question\"");
  }
  const auto ex = pipeline_.ask(*backend_, (*j)["question"].get<std::string>());
  const auto payload = qa::to_json(ex, graph_);
  switch (ex.status) {
    case qa::QaStatus::Success: return json_response(200, payload);
    case qa::QaStatus::ExhaustedRepairs: return json_response(422, payload);
    case qa::QaStatus::BackendFailure: return json_response(502, payload);
  }
  return json_response(500, payload);
}

Response Service::cypher(const std::string& body) const {
  const auto j = parse_body(body);
  if (!j || !j->contains("query") || !(*j)["query"].is_string()) {
    return error_response(400, "BadRequest", "body must be a JSON object with a string \"query\"");
  }
  try {
    const auto ast = qa::sanitize((*j)["query"].get<std::string>());
    const auto table = cypher::evaluate(graph_, ast);
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::array();
      for (const auto& v : row) r.push_back(qa::value_to_json(graph_, v));
      rows.push_back(std::move(r));
    }
    return json_response(200, json{{"cypher", cypher::render(ast)},
                                   {"columns", table.columns},
                                   {"rows", rows},
                                   {"row_count", table.rows.size()}});
  } catch (const Error& e) {
    auto payload = error_json(e.code(), e.what());
    if (const auto* p = dynamic_cast<const ParseError*>(&e)) payload["error"]["position"] = p->position();
    if (const auto* l = dynamic_cast<const LexError*>(&e)) payload["error"]["position"] = l->position();
    return json_response(400, payload);
  }
}

Response Service::health() const {
  return json_response(200, json{{"status", "ok"}, {"nodes", graph_.nodes().size()}, {"edges", graph_.edges().size()}});
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const Service& service, std::size_t worker_threads) : impl_(std::make_unique<Impl>()) {
  const std::size_t n = std::max<std::size_t>(1, worker_threads);
  impl_->server.new_task_queue = [n] { return new httplib::ThreadPool(n); };
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  for (const char* path : {"/ask", "/cypher", "/schema", "/health", "/stats"}) {
    impl_->server.Get(path, handler);
    impl_->server.Post(path, handler);
  }
  impl_->server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::info("{} {} {}", req.method, req.path, res.status);
  });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int HttpServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }
bool HttpServer::running() const { return impl_->server.is_running(); }
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void run_service(const ServiceConfig& config) {
  config.validate();
  const auto graph = snapshot_load(config.snapshot);
  std::optional<json> stats;
  const auto report_path = ingest::report_path_for(config.snapshot);
  if (std::filesystem::is_regular_file(report_path)) {
    std::ifstream in(report_path);
    try {
      stats = json::parse(in);
    } catch (const json::exception& e) {
      throw InputError("bad ingest report " + report_path.string() + ": " + e.what());
    }
  }
  const auto templates =
      config.template_dir ? qa::PromptTemplates::load(*config.template_dir) : qa::PromptTemplates::defaults();

  std::unique_ptr<qa::LlmBackend> backend;
  if (config.mock_fixture) {
    backend = std::make_unique<qa::MockBackend>(qa::MockFixture::load(*config.mock_fixture));
  } else {
    const auto backend_config = qa::BackendConfig::from_env();
    spdlog::info("backend endpoint {} model {}", backend_config.endpoint, backend_config.model);
    backend = std::make_unique<qa::HttpBackend>(backend_config);
  }

  qa::AskOptions options;
  options.max_repairs = config.max_repairs;
  options.context_row_cap = config.context_row_cap;
  const Service service(graph, *backend, templates, options, std::move(stats), config.max_backend_calls);
  HttpServer server(service, config.worker_threads);
  spdlog::info("serving {} ({} nodes, {} edges) on {}:{}", config.snapshot.string(), graph.nodes().size(),
               graph.edges().size(), config.host, config.port);
  if (!server.listen(config.host, config.port)) {
    throw InputError("cannot listen on " + config.host + ":" + std::to_string(config.port));
  }
}

}  // namespace hecix::service
