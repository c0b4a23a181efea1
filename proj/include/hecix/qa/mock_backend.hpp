#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hecix/qa/backend.hpp"

namespace hecix::qa {

struct MockRule {
  std::string match;                // case-insensitive substring of the question
  std::optional<Purpose> purpose;   // unset: query generation (cypher)
  std::string completion;
};

// Fixture file:
//   {"rules": [{"match": "...", "purpose": "repair", "completion": "..."}],
//    "default": "MATCH (n) RETURN count(n)"}
struct MockFixture {
  std::vector<MockRule> rules;
  std::optional<std::string> default_completion;

  static MockFixture from_json(const nlohmann::json& j);
  static MockFixture load(const std::filesystem::path& path);
};

inline constexpr std::size_t kMockEmbeddingDims = 4096;

// Deterministic, stateless backend.
//  - Rules are tried in order against slots["question"] (or the user text).
//  - cypher/repair without a rule: the fixture default, else BackendError.
//  - answer: the context rows restated one per sentence, or a no-results line.
//  - statements: sentence split of slots["text"], one per line.
//  - support: "yes" when slots["statement"] occurs in slots["context"]
//    ignoring case.
//  - questions: slots["n"] rotations of the first sentence of slots["answer"].
//  - relevance: "yes" when word-set Jaccard of slots["chunk"] and
//    slots["ground_truth"] is at least 0.2.
//  - embed: hashed term frequencies, L2-normalized.
class MockBackend : public LlmBackend {
public:
  explicit MockBackend(MockFixture fixture = {}) : fixture_(std::move(fixture)) {}

  std::string complete(const CompletionRequest& request) override;
  std::vector<double> embed(const std::string& text) override;
  std::string name() const override { return "mock"; }

private:
  MockFixture fixture_;
};

// The mock's answer text for a formatted context (see qa::context_chunks).
std::string mock_answer(const std::vector<std::string>& chunks);

}  // namespace hecix::qa
