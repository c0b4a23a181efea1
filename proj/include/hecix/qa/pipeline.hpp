#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hecix/cypher/ast.hpp"
#include "hecix/cypher/result_table.hpp"
#include "hecix/cypher/schema.hpp"
#include "hecix/cypher/semantics.hpp"
#include "hecix/graph/property_graph.hpp"
#include "hecix/qa/backend.hpp"
#include "hecix/qa/templates.hpp"

namespace hecix::qa {

inline constexpr std::int64_t kDefaultLimit = 50;
inline constexpr std::string_view kForbiddenWords[] = {"CREATE", "MERGE", "SET",  "DELETE",
                                                        "REMOVE", "DROP",  "CALL", "LOAD"};

// Rejects any forbidden word outside string literals, backticked names and
// comments (ForbiddenClause), then parses (LexError, ParseError,
// UnboundVariable pass through) and adds LIMIT 50 when no limit is given.
cypher::QueryAst sanitize(std::string_view query_text);

// Raw completion for the question with surrounding code fences, a leading
// "cypher" tag and one trailing semicolon removed.
std::string generate_cypher(LlmBackend& backend, const PromptTemplate& cypher_template, const std::string& schema_text,
                            const std::string& question);
std::string strip_code_fence(std::string_view completion);

// Header line of column names, one tab-separated line per row, and
// "…(+N more)" when more than row_cap rows exist. Tabs and newlines inside
// cells are written as \t and \n.
std::string format_context(const PropertyGraph& graph, const cypher::ResultTable& table, std::size_t row_cap);

// The context as retrieval chunks, one per row: "col: value; col: value".
std::vector<std::string> context_chunks(const PropertyGraph& graph, const cypher::ResultTable& table,
                                        std::size_t row_cap);

struct AskOptions {
  int max_repairs = 2;
  std::size_t context_row_cap = 50;
  cypher::EvalOptions eval;
};

enum class QaStatus { Success, ExhaustedRepairs, BackendFailure };
std::string to_string(QaStatus status);

struct Attempt {
  std::string query_text;
  std::string outcome;  // "ok" or an error code
  std::string detail;
  std::vector<std::string> warnings;

  bool operator==(const Attempt&) const = default;
};

struct StageTimings {
  double generate_ms = 0;
  double validate_ms = 0;
  double execute_ms = 0;
  double answer_ms = 0;
};

struct QaExchange {
  std::string question;
  std::vector<Attempt> attempts;
  std::optional<cypher::QueryAst> executed_query;
  std::string executed_cypher;  // rendered executed_query
  cypher::ResultTable context;
  std::string context_text;
  std::vector<std::string> context_chunks;
  std::string answer;  // empty unless status is Success
  QaStatus status = QaStatus::Success;
  std::string error_code;
  std::string error_message;
  std::size_t context_row_cap = 50;
  StageTimings timings;
};

// Generation, sanitizing, validation and repair, execution, answer
// synthesis. Holds the schema text for one immutable graph; ask() may run
// concurrently from several threads.
class QaPipeline {
public:
  QaPipeline(const PropertyGraph& graph, PromptTemplates templates, AskOptions options = {});

  // Never throws for query or backend problems: they end up in the status.
  QaExchange ask(LlmBackend& backend, const std::string& question) const;

  const std::string& schema_text() const { return schema_text_; }
  const PropertyGraph& graph() const { return graph_; }
  const AskOptions& options() const { return options_; }

private:
  const PropertyGraph& graph_;
  PromptTemplates templates_;
  AskOptions options_;
  cypher::SchemaDescriptor schema_;
  std::string schema_text_;
};

QaExchange ask(LlmBackend& backend, const PropertyGraph& graph, const PromptTemplates& templates,
               const std::string& question, const AskOptions& options = {});

// JSON for transcripts and the service. Timings only when requested, so
// that transcripts are reproducible.
nlohmann::json to_json(const QaExchange& exchange, const PropertyGraph& graph, bool with_timings = false);
nlohmann::json value_to_json(const PropertyGraph& graph, const Value& value);

}  // namespace hecix::qa
