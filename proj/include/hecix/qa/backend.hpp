#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

namespace hecix::qa {

// What a completion is for. Live backends only see system/user text; the
// mock uses purpose and slots to answer deterministically.
enum class Purpose { Cypher, Repair, Answer, Statements, Support, Questions, Relevance };

std::string to_string(Purpose purpose);
Purpose purpose_from_string(const std::string& text);  // throws std::invalid_argument

struct CompletionRequest {
  Purpose purpose = Purpose::Cypher;
  std::string system;
  std::string user;
  std::map<std::string, std::string> slots;  // template fields, e.g. "question"
};

// Chat-completion style model access. Implementations must be safe to call
// from several threads at once. Failures raise BackendError.
class LlmBackend {
public:
  virtual ~LlmBackend() = default;
  virtual std::string complete(const CompletionRequest& request) = 0;
  virtual std::vector<double> embed(const std::string& text) = 0;
  virtual std::string name() const = 0;
};

struct BackendConfig {
  std::string endpoint;    // base URL, e.g. https://api.openai.com/v1
  std::string model;
  std::string credential;  // never logged or serialized
  std::chrono::milliseconds timeout{60000};
  int max_retries = 2;

  // HECIX_LLM_ENDPOINT, HECIX_LLM_MODEL, HECIX_LLM_KEY, HECIX_LLM_TIMEOUT_S.
  // Throws InputError when the endpoint or model is missing.
  static BackendConfig from_env();
};

}  // namespace hecix::qa
