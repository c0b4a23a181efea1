#include "hecix/qa/backend.hpp"

#include <cstdlib>
#include <stdexcept>

#include "hecix/errors.hpp"

namespace hecix::qa {

namespace {

constexpr std::pair<Purpose, const char*> kPurposes[] = {
    {Purpose::Cypher, "cypher"},       {Purpose::Repair, "repair"},   {Purpose::Answer, "answer"},
    {Purpose::Statements, "statements"}, {Purpose::Support, "support"}, {Purpose::Questions, "questions"},
    {Purpose::Relevance, "relevance"},
};

std::string env(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

}  // namespace

std::string to_string(Purpose purpose) {
  for (const auto& [p, name] : kPurposes) {
    if (p == purpose) return name;
  }
  return "unknown";
}

Purpose purpose_from_string(const std::string& text) {
  for (const auto& [p, name] : kPurposes) {
    if (text == name) return p;
  }
  throw std::invalid_argument("unknown purpose: " + text);
}

BackendConfig BackendConfig::from_env() {
  BackendConfig c;
  c.endpoint = env("HECIX_LLM_ENDPOINT");
  c.model = env("HECIX_LLM_MODEL");
  c.credential = env("HECIX_LLM_KEY");
  if (c.endpoint.empty()) throw InputError("HECIX_LLM_ENDPOINT is not set (or pass a mock backend fixture)");
  if (c.model.empty()) throw InputError("HECIX_LLM_MODEL is not set");
  if (const auto t = env("HECIX_LLM_TIMEOUT_S"); !t.empty()) {
    try {
      const double secs = std::stod(t);
      if (!(secs > 0)) throw std::invalid_argument("non-positive");
      c.timeout = std::chrono::milliseconds(static_cast<long long>(secs * 1000));
    } catch (const std::exception&) {
      throw InputError("HECIX_LLM_TIMEOUT_S must be a positive number of seconds");
    }
  }
  return c;
}

}  // namespace hecix::qa
