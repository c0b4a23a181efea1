#include "hecix/eval/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>
#include <nlohmann/json.hpp>

#include "hecix/errors.hpp"
#include "hecix/qa/text_utils.hpp"

namespace hecix::eval {

using nlohmann::json;
using qa::CompletionRequest;
using qa::Purpose;

std::vector<EvalSample> parse_suite(std::istream& in) {
  std::vector<EvalSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (qa::trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      EvalSample s;
      s.id = j.contains("id") ? j.at("id").get<std::string>() : "s" + std::to_string(samples.size() + 1);
      s.question = j.at("question").get<std::string>();
      s.ground_truth = j.value("ground_truth", std::string());
      if (j.contains("answer") && !j.at("answer").is_null()) s.answer = j.at("answer").get<std::string>();
      if (j.contains("contexts") && !j.at("contexts").is_null()) {
        s.contexts = j.at("contexts").get<std::vector<std::string>>();
      }
      samples.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw MalformedRecord(line_no, e.what());
    }
  }
  return samples;
}

std::vector<EvalSample> load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read suite " + path.string());
  return parse_suite(in);
}

std::vector<std::string> completion_lines(const std::string& completion) {
  std::vector<std::string> out;
  std::istringstream in(completion);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = qa::trim(line);
    std::size_t i = 0;
    while (i < t.size() && (std::isdigit(static_cast<unsigned char>(t[i])))) ++i;
    if (i > 0 && i < t.size() && (t[i] == '.' || t[i] == ')')) t = qa::trim(t.substr(i + 1));
    else if (t.starts_with("- ") || t.starts_with("* ")) t = qa::trim(t.substr(2));
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

namespace {

bool is_yes(const std::string& completion) {
  return qa::to_lower(qa::trim(completion)).starts_with("yes");
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

Judge::Judge(qa::LlmBackend& backend, qa::JudgeTemplates templates)
    : backend_(backend), templates_(std::move(templates)) {}

std::vector<std::string> Judge::decompose_statements(const std::string& text) const {
  if (qa::trim(text).empty()) return {};
  CompletionRequest r;
  r.purpose = Purpose::Statements;
  r.slots = {{"text", text}};
  r.user = templates_.statements.fill(r.slots);
  return completion_lines(backend_.complete(r));
}

bool Judge::supported(const std::string& statement, const std::string& context) const {
  CompletionRequest r;
  r.purpose = Purpose::Support;
  r.slots = {{"statement", statement}, {"context", context}};
  r.user = templates_.support.fill(r.slots);
  return is_yes(backend_.complete(r));
}

std::vector<std::string> Judge::generate_questions(const std::string& answer, std::size_t n) const {
  CompletionRequest r;
  r.purpose = Purpose::Questions;
  r.slots = {{"answer", answer}, {"n", std::to_string(n)}};
  r.user = templates_.questions.fill(r.slots);
  auto lines = completion_lines(backend_.complete(r));
  if (lines.size() > n) lines.resize(n);
  return lines;
}

bool Judge::chunk_relevant(const std::string& question, const std::string& ground_truth,
                           const std::string& chunk) const {
  CompletionRequest r;
  r.purpose = Purpose::Relevance;
  r.slots = {{"question", question}, {"ground_truth", ground_truth}, {"chunk", chunk}};
  r.user = templates_.relevance.fill(r.slots);
  return is_yes(backend_.complete(r));
}

std::vector<double> Judge::embed(const std::string& text) const { return backend_.embed(text); }

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InputError("embedding sizes differ");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double rank_weighted_precision(const std::vector<bool>& relevant) {
  double sum = 0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < relevant.size(); ++k) {
    if (!relevant[k]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

namespace {

double supported_fraction(const Judge& judge, const std::vector<std::string>& statements,
                          const std::vector<std::string>& contexts) {
  const std::string context = join(contexts, "\n");
  std::size_t supported = 0;
  for (const auto& s : statements) {
    if (judge.supported(s, context)) ++supported;
  }
  return static_cast<double>(supported) / static_cast<double>(statements.size());
}

const std::vector<std::string>& contexts_of(const EvalSample& sample) {
  static const std::vector<std::string> none;
  return sample.contexts ? *sample.contexts : none;
}

}  // namespace

double faithfulness(const Judge& judge, const EvalSample& sample) {
  if (!sample.answer || qa::trim(*sample.answer).empty()) throw NotApplicable("empty answer");
  const auto statements = judge.decompose_statements(*sample.answer);
  if (statements.empty()) throw NotApplicable("answer has no statements");
  return supported_fraction(judge, statements, contexts_of(sample));
}

double answer_relevance(const Judge& judge, const EvalSample& sample, std::size_t n_questions) {
  if (!sample.answer || qa::trim(*sample.answer).empty()) throw NotApplicable("empty answer");
  const auto generated = judge.generate_questions(*sample.answer, n_questions);
  if (generated.empty()) throw NotApplicable("no questions generated from the answer");
  const auto original = judge.embed(sample.question);
  double sum = 0;
  for (const auto& q : generated) sum += std::clamp(cosine(original, judge.embed(q)), 0.0, 1.0);
  return std::clamp(sum / static_cast<double>(generated.size()), 0.0, 1.0);
}

double context_precision(const Judge& judge, const EvalSample& sample) {
  if (qa::trim(sample.ground_truth).empty()) throw NotApplicable("empty ground truth");
  const auto& contexts = contexts_of(sample);
  if (contexts.empty()) throw NotApplicable("no contexts");
  std::vector<bool> relevant;
  for (const auto& c : contexts) relevant.push_back(judge.chunk_relevant(sample.question, sample.ground_truth, c));
  return rank_weighted_precision(relevant);
}

double context_recall(const Judge& judge, const EvalSample& sample) {
  if (qa::trim(sample.ground_truth).empty()) throw NotApplicable("empty ground truth");
  const auto statements = judge.decompose_statements(sample.ground_truth);
  if (statements.empty()) throw NotApplicable("ground truth has no statements");
  return supported_fraction(judge, statements, contexts_of(sample));
}

void MetricReport::aggregate() {
  auto mean_of = [this](std::optional<double> SampleScores::*field) {
    Aggregate a;
    double sum = 0;
    for (const auto& s : samples) {
      if (!(s.*field)) continue;
      sum += *(s.*field);
      ++a.applicable;
    }
    if (a.applicable > 0) a.mean = sum / static_cast<double>(a.applicable);
    return a;
  };
  faithfulness = mean_of(&SampleScores::faithfulness);
  answer_relevance = mean_of(&SampleScores::answer_relevance);
  context_precision = mean_of(&SampleScores::context_precision);
  context_recall = mean_of(&SampleScores::context_recall);
}

namespace {

template <typename F>
std::optional<double> score_or_na(F&& f) {
  try {
    return f();
  } catch (const NotApplicable&) {
    return std::nullopt;
  }
}

SampleScores score_sample(qa::LlmBackend& backend, const EvalSample& input, const qa::QaPipeline* pipeline,
                          const Judge& judge, const SuiteOptions& options) {
  SampleScores out;
  out.id = input.id;
  out.question = input.question;
  try {
    EvalSample sample = input;
    if (pipeline) {
      const auto ex = pipeline->ask(backend, input.question);
      sample.answer = ex.answer;
      sample.contexts = ex.context_chunks;
      if (ex.status != qa::QaStatus::Success) {
        out.status = qa::to_string(ex.status);
        out.error = ex.error_code + ": " + ex.error_message;
      }
    }
    out.answer = sample.answer.value_or("");
    out.contexts = contexts_of(sample);
    out.faithfulness = score_or_na([&] { return faithfulness(judge, sample); });
    out.answer_relevance = score_or_na([&] { return answer_relevance(judge, sample, options.n_questions); });
    out.context_precision = score_or_na([&] { return context_precision(judge, sample); });
    out.context_recall = score_or_na([&] { return context_recall(judge, sample); });
  } catch (const std::exception& e) {
    out.status = "error";
    out.error = e.what();
    out.faithfulness.reset();
    out.answer_relevance.reset();
    out.context_precision.reset();
    out.context_recall.reset();
  }
  return out;
}

}  // namespace

MetricReport evaluate_suite(qa::LlmBackend& backend, const std::vector<EvalSample>& samples,
                            const qa::QaPipeline* pipeline, const qa::JudgeTemplates& templates,
                            const SuiteOptions& options) {
  const Judge judge(backend, templates);
  MetricReport report;
  report.samples.resize(samples.size());
  const int n = static_cast<int>(samples.size());
  const int threads = static_cast<int>(std::max<std::size_t>(1, options.parallelism));
#pragma omp parallel for num_threads(threads) schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    report.samples[static_cast<std::size_t>(i)] =
        score_sample(backend, samples[static_cast<std::size_t>(i)], pipeline, judge, options);
  }
  report.aggregate();
  return report;
}

namespace {

std::string fixed4(std::optional<double> v) {
  if (!v) return "NA";
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << *v;
  return out.str();
}

json score_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

std::string tsv_cell(std::string text) {
  std::replace(text.begin(), text.end(), '\t', ' ');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

}  // namespace

void write_metrics_tsv(std::ostream& out, const MetricReport& r) {
  out << "metric\tscore\tapplicable\treference\n";
  auto row = [&](const char* name, const Aggregate& a, double reference) {
    out << name << '\t' << fixed4(a.mean) << '\t' << a.applicable << '\t' << fixed4(reference) << '\n';
  };
  row("Faithfulness", r.faithfulness, ReferenceScores::faithfulness);
  row("Answer Relevance", r.answer_relevance, ReferenceScores::answer_relevance);
  row("Context Precision", r.context_precision, ReferenceScores::context_precision);
  row("Context Recall", r.context_recall, ReferenceScores::context_recall);
}

void write_samples_tsv(std::ostream& out, const MetricReport& r) {
  out << "id\tstatus\tfaithfulness\tanswer_relevance\tcontext_precision\tcontext_recall\tquestion\terror\n";
  for (const auto& s : r.samples) {
    out << tsv_cell(s.id) << '\t' << s.status << '\t' << fixed4(s.faithfulness) << '\t' << fixed4(s.answer_relevance)
        << '\t' << fixed4(s.context_precision) << '\t' << fixed4(s.context_recall) << '\t' << tsv_cell(s.question)
        << '\t' << tsv_cell(s.error) << '\n';
  }
}

json summary_json(const MetricReport& r) {
  auto agg = [](const Aggregate& a, double reference) {
    return json{{"mean", score_json(a.mean)}, {"applicable", a.applicable}, {"reference", reference}};
  };
  json samples = json::array();
  for (const auto& s : r.samples) {
    json entry{{"id", s.id},
               {"question", s.question},
               {"status", s.status},
               {"answer", s.answer},
               {"contexts", s.contexts},
               {"faithfulness", score_json(s.faithfulness)},
               {"answer_relevance", score_json(s.answer_relevance)},
               {"context_precision", score_json(s.context_precision)},
               {"context_recall", score_json(s.context_recall)}};
    if (!s.error.empty()) entry["error"] = s.error;
    samples.push_back(std::move(entry));
  }
  return json{{"metrics",
               {{"faithfulness", agg(r.faithfulness, ReferenceScores::faithfulness)},
                {"answer_relevance", agg(r.answer_relevance, ReferenceScores::answer_relevance)},
                {"context_precision", agg(r.context_precision, ReferenceScores::context_precision)},
                {"context_recall", agg(r.context_recall, ReferenceScores::context_recall)}}},
              {"sample_count", r.samples.size()},
              {"samples", samples}};
}

void write_report(const std::filesystem::path& dir, const MetricReport& report) {
  std::filesystem::create_directories(dir);
  std::ofstream metrics(dir / "metrics.tsv");
  std::ofstream samples(dir / "samples.tsv");
  std::ofstream summary(dir / "summary.json");
  if (!metrics || !samples || !summary) throw InputError("cannot write report into " + dir.string());
  write_metrics_tsv(metrics, report);
  write_samples_tsv(samples, report);
  summary << summary_json(report).dump(2) << '\n';
}

}  // namespace hecix::eval
