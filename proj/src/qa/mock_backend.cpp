#include "hecix/qa/mock_backend.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "hecix/errors.hpp"
#include "hecix/qa/text_utils.hpp"

namespace hecix::qa {

using nlohmann::json;

MockFixture MockFixture::from_json(const json& j) {
  MockFixture f;
  for (const auto& r : j.value("rules", json::array())) {
    MockRule rule;
    rule.match = r.at("match").get<std::string>();
    if (r.contains("purpose")) rule.purpose = purpose_from_string(r.at("purpose").get<std::string>());
    rule.completion = r.at("completion").get<std::string>();
    f.rules.push_back(std::move(rule));
  }
  if (j.contains("default") && j.at("default").is_string()) f.default_completion = j.at("default").get<std::string>();
  return f;
}

MockFixture MockFixture::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read mock backend fixture " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw InputError("bad mock backend fixture " + path.string() + ": " + e.what());
  }
}

namespace {

std::string slot(const CompletionRequest& r, const std::string& key) {
  const auto it = r.slots.find(key);
  return it == r.slots.end() ? std::string() : it->second;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out += '\n';
    out += l;
  }
  return out;
}

std::string rotated_question(const std::vector<std::string>& w, std::size_t k) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += w[(i + k) % w.size()];
  }
  return out + "?";
}

}  // namespace

std::string mock_answer(const std::vector<std::string>& chunks) {
  if (chunks.empty()) return "No results were found for this question.";
  std::string out;
  for (const auto& c : chunks) {
    if (!out.empty()) out += ' ';
    out += c + ".";
  }
  return out;
}

std::string MockBackend::complete(const CompletionRequest& request) {
  const std::string subject = to_lower(request.slots.contains("question") ? slot(request, "question") : request.user);
  for (const auto& rule : fixture_.rules) {
    const Purpose p = rule.purpose.value_or(Purpose::Cypher);
    if (p == request.purpose && subject.find(to_lower(rule.match)) != std::string::npos) return rule.completion;
  }
  switch (request.purpose) {
    case Purpose::Cypher:
    case Purpose::Repair:
      if (fixture_.default_completion) return *fixture_.default_completion;
      throw BackendError("mock backend has no completion for: " + slot(request, "question"));
    case Purpose::Answer: {
      const auto chunks = json::parse(slot(request, "chunks_json")).get<std::vector<std::string>>();
      return mock_answer(chunks);
    }
    case Purpose::Statements:
      return join_lines(split_sentences(slot(request, "text")));
    case Purpose::Support: {
      const auto statement = to_lower(trim(slot(request, "statement")));
      return !statement.empty() && to_lower(slot(request, "context")).find(statement) != std::string::npos ? "yes" : "no";
    }
    case Purpose::Questions: {
      const auto sentences = split_sentences(slot(request, "answer"));
      if (sentences.empty()) return "";
      const auto w = words(sentences.front());
      if (w.empty()) return "";
      const std::size_t n = std::stoul(slot(request, "n").empty() ? "3" : slot(request, "n"));
      std::vector<std::string> out;
      for (std::size_t k = 0; k < n; ++k) out.push_back(rotated_question(w, k));
      return join_lines(out);
    }
    case Purpose::Relevance:
      return jaccard(word_set(slot(request, "chunk")), word_set(slot(request, "ground_truth"))) >= 0.2 ? "yes" : "no";
  }
  throw BackendError("unsupported request");
}

std::vector<double> MockBackend::embed(const std::string& text) {
  std::vector<double> v(kMockEmbeddingDims, 0.0);
  for (const auto& w : words(text)) {
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a
    for (unsigned char c : w) {
      h ^= c;
      h *= 1099511628211ull;
    }
    v[h % kMockEmbeddingDims] += 1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
  }
  return v;
}

}  // namespace hecix::qa
