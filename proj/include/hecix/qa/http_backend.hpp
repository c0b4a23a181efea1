#pragma once

#include "hecix/qa/backend.hpp"

namespace hecix::qa {

// OpenAI-compatible wire client: POST {endpoint}/chat/completions and
// {endpoint}/embeddings with a bearer credential. Transport failures,
// HTTP 429 and 5xx are retried up to max_retries times with backoff.
class HttpBackend : public LlmBackend {
public:
  explicit HttpBackend(BackendConfig config);

  std::string complete(const CompletionRequest& request) override;
  std::vector<double> embed(const std::string& text) override;
  std::string name() const override { return "http:" + config_.model; }

private:
  std::string post(const std::string& path, const std::string& body);

  BackendConfig config_;
};

}  // namespace hecix::qa
