#include <doctest.h>

#include <sstream>
#include <nlohmann/json.hpp>

#include "hecix/errors.hpp"
#include "hecix/eval/metrics.hpp"
#include "hecix/qa/mock_backend.hpp"

using namespace hecix;
using namespace hecix::eval;

namespace {

EvalSample sample(std::string question, std::string ground_truth, std::optional<std::string> answer,
                  std::vector<std::string> contexts) {
  EvalSample s;
  s.id = question;
  s.question = std::move(question);
  s.ground_truth = std::move(ground_truth);
  s.answer = std::move(answer);
  s.contexts = std::move(contexts);
  return s;
}

}  // namespace

TEST_CASE("statement decomposition with the mock judge") {
  qa::MockBackend backend;
  const Judge judge(backend);
  CHECK(judge.decompose_statements("Vitiligo is studied in 3 trials. JAK inhibitors are used.").size() == 2);
  CHECK(judge.decompose_statements("").empty());
  CHECK(completion_lines("1. first\n- second\n\n  third  \n2) fourth") ==
        std::vector<std::string>{"first", "second", "third", "fourth"});
}

TEST_CASE("faithfulness") {
  qa::MockBackend backend;
  const Judge judge(backend);
  CHECK(faithfulness(judge, sample("q", "", "gene: TYR. gene: PTPN22.", {"gene: TYR", "gene: PTPN22"})) == 1.0);
  CHECK(faithfulness(judge, sample("q", "", "gene: TYR. gene: IL13.", {"gene: TYR", "gene: PTPN22"})) == 0.5);
  CHECK(faithfulness(judge, sample("q", "", "gene: TYR.", {})) == 0.0);
  CHECK_THROWS_AS(faithfulness(judge, sample("q", "", "", {"x"})), NotApplicable);
  CHECK_THROWS_AS(faithfulness(judge, sample("q", "", std::nullopt, {"x"})), NotApplicable);
  CHECK_THROWS_AS(faithfulness(judge, sample("q", "", " ... ", {"x"})), NotApplicable);
}

TEST_CASE("answer relevance") {
  qa::MockBackend backend;
  const Judge judge(backend);
  // Rotations keep the bag of words, so identical vocabulary scores 1.
  CHECK(answer_relevance(judge, sample("alpha beta gamma", "", "gamma alpha beta.", {})) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(answer_relevance(judge, sample("alpha beta", "", "delta epsilon.", {})) == 0.0);
  // {alpha, beta} against {alpha, gamma}: 1 / (sqrt(2) * sqrt(2)).
  CHECK(answer_relevance(judge, sample("alpha beta", "", "alpha gamma.", {})) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // {alpha, alpha, beta} against {alpha, beta, delta, epsilon}: 3 / (sqrt(5) * 2).
  CHECK(answer_relevance(judge, sample("alpha alpha beta", "", "alpha beta delta epsilon.", {})) ==
        doctest::Approx(3.0 / (std::sqrt(5.0) * 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(answer_relevance(judge, sample("q", "", "", {})), NotApplicable);
  CHECK(cosine({1, 0}, {0, 1}) == 0.0);
  CHECK(cosine({0, 0}, {0, 1}) == 0.0);
}

TEST_CASE("context precision follows the rank formula") {
  CHECK(rank_weighted_precision({true, true, true}) == 1.0);
  CHECK(rank_weighted_precision({false, false}) == 0.0);
  CHECK(rank_weighted_precision({true, false, true}) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(rank_weighted_precision({}) == 0.0);

  qa::MockBackend backend;
  const Judge judge(backend);
  const std::string gt = "vitiligo trial phase three";
  const std::string hit = "vitiligo trial phase three";
  const std::string miss = "unrelated words entirely here";
  CHECK(context_precision(judge, sample("q", gt, "a", {hit, hit})) == 1.0);
  CHECK(context_precision(judge, sample("q", gt, "a", {miss, miss})) == 0.0);
  CHECK(std::abs(context_precision(judge, sample("q", gt, "a", {hit, miss, hit})) - 0.8333333333333334) < 1e-9);
  CHECK_THROWS_AS(context_precision(judge, sample("q", gt, "a", {})), NotApplicable);
  CHECK_THROWS_AS(context_precision(judge, sample("q", "", "a", {hit})), NotApplicable);
}

TEST_CASE("context recall") {
  qa::MockBackend backend;
  const Judge judge(backend);
  const std::string gt = "PTPN22. TYR. IL13";
  CHECK(context_recall(judge, sample("q", gt, "a", {"gene: PTPN22", "gene: TYR", "gene: IL13"})) == 1.0);
  CHECK(context_recall(judge, sample("q", gt, "a", {"gene: ESR1"})) == 0.0);
  CHECK(context_recall(judge, sample("q", gt, "a", {"gene: PTPN22", "gene: TYR"})) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(context_recall(judge, sample("q", "", "a", {"x"})), NotApplicable);
}

TEST_CASE("suite aggregates over applicable samples") {
  qa::MockBackend backend;
  const std::vector<EvalSample> samples{
      // All four metrics 1 except relevance (vocabulary differs).
      sample("genes", "TYR", "gene: TYR.", {"gene: TYR"}),
      // Faithfulness 0.5, recall 0.5, precision 1 (both chunks share the ground truth words).
      sample("genes", "TYR. IL13", "gene: TYR. gene: ESR1.", {"gene: TYR", "TYR gene"}),
      // Empty answer: faithfulness and relevance not applicable; recall 0; precision 0.
      sample("genes", "IL13", "", {"nothing relevant"}),
      // No contexts: precision not applicable; faithfulness 0; recall 0.
      sample("genes", "IL13", "gene: IL13.", {}),
  };
  const auto report = evaluate_suite(backend, samples);
  REQUIRE(report.samples.size() == 4);
  CHECK(report.faithfulness.applicable == 3);
  CHECK(*report.faithfulness.mean == doctest::Approx((1.0 + 0.5 + 0.0) / 3));
  CHECK(report.context_recall.applicable == 4);
  CHECK(*report.context_recall.mean == doctest::Approx((1.0 + 0.5 + 0.0 + 0.0) / 4));
  CHECK(report.context_precision.applicable == 3);
  CHECK(*report.context_precision.mean == doctest::Approx((1.0 + 1.0 + 0.0) / 3));
  CHECK(report.answer_relevance.applicable == 3);

  const auto again = evaluate_suite(backend, samples, nullptr, qa::JudgeTemplates::defaults(), {1, 3});
  CHECK(summary_json(report).dump() == summary_json(again).dump());
}

TEST_CASE("empty suite reports not-applicable aggregates") {
  qa::MockBackend backend;
  const auto report = evaluate_suite(backend, {});
  CHECK_FALSE(report.faithfulness.mean.has_value());
  std::ostringstream out;
  write_metrics_tsv(out, report);
  CHECK(out.str() ==
        "metric\tscore\tapplicable\treference\n"
        "Faithfulness\tNA\t0\t0.8572\n"
        "Answer Relevance\tNA\t0\t0.9340\n"
        "Context Precision\tNA\t0\t0.9202\n"
        "Context Recall\tNA\t0\t0.6654\n");
}

TEST_CASE("per-sample failures never abort the suite") {
  struct Flaky : qa::MockBackend {
    std::string complete(const qa::CompletionRequest& r) override {
      if (r.slots.contains("text") && r.slots.at("text").find("boom") != std::string::npos) {
        throw BackendError("judge unavailable");
      }
      return MockBackend::complete(r);
    }
  };
  Flaky backend;
  const auto report =
      evaluate_suite(backend, {sample("q", "TYR", "boom.", {"TYR"}), sample("q", "TYR", "TYR.", {"TYR"})});
  CHECK(report.samples[0].status == "error");
  CHECK(report.samples[0].error == "judge unavailable");
  CHECK(report.samples[1].status == "ok");
  CHECK(report.faithfulness.applicable == 1);
}

TEST_CASE("suite files") {
  std::istringstream in(
      R"({"id":"a","question":"Q1","ground_truth":"G1"})"
      "\n\n"
      R"({"question":"Q2","ground_truth":"G2","answer":"A","contexts":["c1","c2"]})"
      "\n");
  const auto samples = parse_suite(in);
  REQUIRE(samples.size() == 2);
  CHECK(samples[0].id == "a");
  CHECK_FALSE(samples[0].answer.has_value());
  CHECK(samples[1].id == "s2");
  CHECK(samples[1].contexts->size() == 2);

  std::istringstream bad("{\"question\":\"Q\"}\n{not json}\n");
  try {
    parse_suite(bad);
    FAIL("expected MalformedRecord");
  } catch (const MalformedRecord& e) {
    CHECK(e.line() == 2);
  }
  CHECK(load_suite(HECIX_SOURCE_DIR "/data/suite/questions.jsonl").size() == 30);
}
