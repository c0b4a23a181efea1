#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hecix::qa {

// Prompt text with `{name}` placeholders. Every required placeholder must
// occur exactly once; other braces are literal text.
class PromptTemplate {
public:
  PromptTemplate(std::string name, std::string text, std::vector<std::string> placeholders);

  // Single pass: substituted values are never re-expanded. Throws
  // TemplateError when a required value is missing.
  std::string fill(const std::map<std::string, std::string>& values) const;

  const std::string& name() const { return name_; }
  const std::string& text() const { return text_; }
  const std::vector<std::string>& placeholders() const { return placeholders_; }

private:
  std::string name_;
  std::string text_;
  std::vector<std::string> placeholders_;
};

struct PromptTemplates {
  PromptTemplate cypher_generation;  // {schema} {question}
  PromptTemplate answer_synthesis;   // {question} {context}
  PromptTemplate repair;             // {question} {bad_query} {error}

  static PromptTemplates defaults();
  // Files cypher_generation.txt, answer_synthesis.txt, repair.txt; a missing
  // file falls back to the default. Throws TemplateError.
  static PromptTemplates load(const std::filesystem::path& dir);
};

struct JudgeTemplates {
  PromptTemplate statements;  // {text}
  PromptTemplate support;     // {statement} {context}
  PromptTemplate questions;   // {answer} {n}
  PromptTemplate relevance;   // {question} {ground_truth} {chunk}

  static JudgeTemplates defaults();
  // Files judge_statements.txt, judge_support.txt, judge_questions.txt,
  // judge_relevance.txt; missing files fall back to the defaults.
  static JudgeTemplates load(const std::filesystem::path& dir);
};

// Name -> built-in text, keyed by file name ("repair.txt").
const std::map<std::string, std::string_view>& builtin_template_files();

}  // namespace hecix::qa
