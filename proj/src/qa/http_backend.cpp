#include "hecix/qa/http_backend.hpp"

#include <spdlog/spdlog.h>

#include <nlohmann/json.hpp>
#include <thread>

#include "hecix/errors.hpp"
#include "hecix/net/http.hpp"

namespace hecix::qa {

using nlohmann::json;

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
  while (!config_.endpoint.empty() && config_.endpoint.back() == '/') config_.endpoint.pop_back();
  net::parse_url(config_.endpoint);
}

std::string HttpBackend::post(const std::string& path, const std::string& body) {
  std::map<std::string, std::string> headers;
  if (!config_.credential.empty()) headers["Authorization"] = "Bearer " + config_.credential;
  for (int attempt = 0;; ++attempt) {
    const auto backoff = std::chrono::milliseconds(250) * (1 << attempt);
    net::HttpResponse r;
    try {
      r = net::http_post_json(config_.endpoint + path, body, headers, config_.timeout);
    } catch (const BackendError& e) {
      if (attempt >= config_.max_retries) throw;
      spdlog::warn("backend call failed ({}), retrying", e.what());
      std::this_thread::sleep_for(backoff);
      continue;
    }
    if (r.status >= 200 && r.status < 300) return r.body;
    const bool retryable = r.status == 429 || r.status >= 500;
    if (!retryable || attempt >= config_.max_retries) {
      throw BackendError("backend returned HTTP " + std::to_string(r.status));
    }
    spdlog::warn("backend returned HTTP {}, retrying", r.status);
    std::this_thread::sleep_for(backoff);
  }
}

std::string HttpBackend::complete(const CompletionRequest& request) {
  const json body{{"model", config_.model},
                  {"temperature", 0},
                  {"messages", json::array({{{"role", "system"}, {"content", request.system}},
                                            {{"role", "user"}, {"content", request.user}}})}};
  const std::string raw = post("/chat/completions", body.dump());
  try {
    return json::parse(raw).at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("unexpected completion payload: ") + e.what());
  }
}

std::vector<double> HttpBackend::embed(const std::string& text) {
  const json body{{"model", config_.model}, {"input", text}};
  const std::string raw = post("/embeddings", body.dump());
  try {
    return json::parse(raw).at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("unexpected embedding payload: ") + e.what());
  }
}

}  // namespace hecix::qa
