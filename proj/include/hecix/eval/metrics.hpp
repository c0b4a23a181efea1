#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hecix/qa/backend.hpp"
#include "hecix/qa/pipeline.hpp"
#include "hecix/qa/templates.hpp"

namespace hecix::eval {

struct EvalSample {
  std::string id;
  std::string question;
  std::string ground_truth;
  std::optional<std::string> answer;
  std::optional<std::vector<std::string>> contexts;
};

// One JSON object per line: id, question, ground_truth, optional answer and
// contexts. Blank lines are skipped. Throws MalformedRecord with the line.
std::vector<EvalSample> parse_suite(std::istream& in);
std::vector<EvalSample> load_suite(const std::filesystem::path& path);

// Judge calls routed through a backend with the judge prompt templates.
class Judge {
public:
  explicit Judge(qa::LlmBackend& backend, qa::JudgeTemplates templates = qa::JudgeTemplates::defaults());

  std::vector<std::string> decompose_statements(const std::string& text) const;
  bool supported(const std::string& statement, const std::string& context) const;
  std::vector<std::string> generate_questions(const std::string& answer, std::size_t n) const;
  bool chunk_relevant(const std::string& question, const std::string& ground_truth, const std::string& chunk) const;
  std::vector<double> embed(const std::string& text) const;

private:
  qa::LlmBackend& backend_;
  qa::JudgeTemplates templates_;
};

// Lines of a judge completion, trimmed, with list markers removed.
std::vector<std::string> completion_lines(const std::string& completion);

// Cosine similarity; 0 when either vector is zero.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

// Mean over ranks k of precision@k times the relevance indicator at k,
// divided by the number of relevant chunks; 0 when none is relevant.
double rank_weighted_precision(const std::vector<bool>& relevant);

// Each throws NotApplicable when its inputs do not allow a score.
double faithfulness(const Judge& judge, const EvalSample& sample);
double answer_relevance(const Judge& judge, const EvalSample& sample, std::size_t n_questions = 3);
double context_precision(const Judge& judge, const EvalSample& sample);
double context_recall(const Judge& judge, const EvalSample& sample);

struct SampleScores {
  std::string id;
  std::string question;
  std::string answer;
  std::vector<std::string> contexts;
  std::string status = "ok";  // "ok", a pipeline status, or "error"
  std::string error;
  std::optional<double> faithfulness;
  std::optional<double> answer_relevance;
  std::optional<double> context_precision;
  std::optional<double> context_recall;
};

struct Aggregate {
  std::optional<double> mean;  // unset when no sample is applicable
  std::size_t applicable = 0;
};

struct MetricReport {
  std::vector<SampleScores> samples;
  Aggregate faithfulness;
  Aggregate answer_relevance;
  Aggregate context_precision;
  Aggregate context_recall;

  // Recomputes the aggregates from the samples, in sample order.
  void aggregate();
};

struct SuiteOptions {
  std::size_t parallelism = 4;  // concurrent samples; bounds backend load
  std::size_t n_questions = 3;
};

// Scores every sample. With a pipeline, answers and contexts come from
// pipeline->ask(); otherwise from the sample. Failures are recorded per
// sample and never abort the suite.
MetricReport evaluate_suite(qa::LlmBackend& backend, const std::vector<EvalSample>& samples,
                            const qa::QaPipeline* pipeline = nullptr,
                            const qa::JudgeTemplates& templates = qa::JudgeTemplates::defaults(),
                            const SuiteOptions& options = {});

struct ReferenceScores {
  static constexpr double faithfulness = 0.8572;
  static constexpr double answer_relevance = 0.9340;
  static constexpr double context_precision = 0.9202;
  static constexpr double context_recall = 0.6654;
};

// metrics.tsv: metric, score, applicable, reference. NA for missing scores.
void write_metrics_tsv(std::ostream& out, const MetricReport& report);
// samples.tsv: one row per sample.
void write_samples_tsv(std::ostream& out, const MetricReport& report);
nlohmann::json summary_json(const MetricReport& report);
// Writes metrics.tsv, samples.tsv and summary.json into dir.
void write_report(const std::filesystem::path& dir, const MetricReport& report);

}  // namespace hecix::eval
