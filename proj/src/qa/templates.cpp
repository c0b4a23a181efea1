#include "hecix/qa/templates.hpp"

#include <fstream>
#include <sstream>

#include "default_templates.hpp"
#include "hecix/errors.hpp"

namespace hecix::qa {

namespace {

std::size_t occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) ++n;
  return n;
}

PromptTemplate from_dir(const std::filesystem::path& dir, const std::string& file,
                        std::vector<std::string> placeholders) {
  const auto path = dir / file;
  std::string text(builtin_template_files().at(file));
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TemplateError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return PromptTemplate(file, std::move(text), std::move(placeholders));
}

PromptTemplate builtin(const std::string& file, std::vector<std::string> placeholders) {
  return PromptTemplate(file, std::string(builtin_template_files().at(file)), std::move(placeholders));
}

}  // namespace

PromptTemplate::PromptTemplate(std::string name, std::string text, std::vector<std::string> placeholders)
    : name_(std::move(name)), text_(std::move(text)), placeholders_(std::move(placeholders)) {
  for (const auto& p : placeholders_) {
    const auto n = occurrences(text_, "{" + p + "}");
    if (n != 1) {
      throw TemplateError("template " + name_ + " must contain {" + p + "} exactly once (found " + std::to_string(n) + ")");
    }
  }
}

std::string PromptTemplate::fill(const std::map<std::string, std::string>& values) const {
  for (const auto& p : placeholders_) {
    if (!values.contains(p)) throw TemplateError("template " + name_ + " needs a value for {" + p + "}");
  }
  std::string out;
  out.reserve(text_.size());
  std::size_t i = 0;
  while (i < text_.size()) {
    if (text_[i] == '{') {
      const auto close = text_.find('}', i + 1);
      if (close != std::string::npos) {
        const std::string key = text_.substr(i + 1, close - i - 1);
        const auto it = values.find(key);
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += text_[i++];
  }
  return out;
}

const std::map<std::string, std::string_view>& builtin_template_files() {
  static const std::map<std::string, std::string_view> files{
      {"cypher_generation.txt", kTemplateCypherGeneration},
      {"answer_synthesis.txt", kTemplateAnswerSynthesis},
      {"repair.txt", kTemplateRepair},
      {"judge_statements.txt", kTemplateJudgeStatements},
      {"judge_support.txt", kTemplateJudgeSupport},
      {"judge_questions.txt", kTemplateJudgeQuestions},
      {"judge_relevance.txt", kTemplateJudgeRelevance},
  };
  return files;
}

PromptTemplates PromptTemplates::defaults() {
  return {builtin("cypher_generation.txt", {"schema", "question"}),
          builtin("answer_synthesis.txt", {"question", "context"}),
          builtin("repair.txt", {"question", "bad_query", "error"})};
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw TemplateError("template directory not found: " + dir.string());
  return {from_dir(dir, "cypher_generation.txt", {"schema", "question"}),
          from_dir(dir, "answer_synthesis.txt", {"question", "context"}),
          from_dir(dir, "repair.txt", {"question", "bad_query", "error"})};
}

JudgeTemplates JudgeTemplates::defaults() {
  return {builtin("judge_statements.txt", {"text"}), builtin("judge_support.txt", {"statement", "context"}),
          builtin("judge_questions.txt", {"answer", "n"}),
          builtin("judge_relevance.txt", {"question", "ground_truth", "chunk"})};
}

JudgeTemplates JudgeTemplates::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw TemplateError("template directory not found: " + dir.string());
  return {from_dir(dir, "judge_statements.txt", {"text"}), from_dir(dir, "judge_support.txt", {"statement", "context"}),
          from_dir(dir, "judge_questions.txt", {"answer", "n"}),
          from_dir(dir, "judge_relevance.txt", {"question", "ground_truth", "chunk"})};
}

}  // namespace hecix::qa
