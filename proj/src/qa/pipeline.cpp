#include "hecix/qa/pipeline.hpp"

#include <chrono>
#include <cctype>
#include <nlohmann/json.hpp>

#include "hecix/cypher/evaluator.hpp"
#include "hecix/cypher/parser.hpp"
#include "hecix/cypher/render.hpp"
#include "hecix/errors.hpp"
#include "hecix/qa/text_utils.hpp"

namespace hecix::qa {

using nlohmann::json;

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void reject_forbidden_words(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\'' || c == '"') {
      for (++i; i < text.size() && text[i] != c; ++i) {
        if (text[i] == '\\') ++i;
      }
      ++i;
    } else if (c == '`') {
      for (++i; i < text.size(); ++i) {
        if (text[i] == '`') {
          if (i + 1 < text.size() && text[i + 1] == '`') {
            ++i;
            continue;
          }
          break;
        }
      }
      ++i;
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = i;
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      const std::string word = upper(text.substr(start, i - start));
      for (auto f : kForbiddenWords) {
        if (word == f) throw ForbiddenClause(word);
      }
    } else {
      ++i;
    }
  }
}

std::string escape_cell(std::string text) {
  std::string out;
  for (char c : text) {
    if (c == '\t') out += "\\t";
    else if (c == '\n') out += "\\n";
    else if (c == '\r') out += "\\r";
    else out += c;
  }
  return out;
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string known_names(const std::map<std::string, std::set<std::string>>& names) {
  std::string out;
  for (const auto& [n, _] : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

}  // namespace

cypher::QueryAst sanitize(std::string_view query_text) {
  reject_forbidden_words(query_text);
  auto ast = cypher::parse(query_text);
  if (!ast.limit) ast.limit = kDefaultLimit;
  return ast;
}

std::string strip_code_fence(std::string_view completion) {
  std::string text = trim(completion);
  if (text.starts_with("```")) {
    const auto first_newline = text.find('\n');
    text = first_newline == std::string::npos ? text.substr(3) : text.substr(first_newline + 1);
    const auto close = text.rfind("```");
    if (close != std::string::npos) text.erase(close);
    text = trim(text);
  }
  if (to_lower(text.substr(0, 7)) == "cypher\n") text = trim(text.substr(7));
  if (!text.empty() && text.back() == ';') text = trim(text.substr(0, text.size() - 1));
  return text;
}

std::string generate_cypher(LlmBackend& backend, const PromptTemplate& cypher_template, const std::string& schema_text,
                            const std::string& question) {
  CompletionRequest request;
  request.purpose = Purpose::Cypher;
  request.system = "You translate questions into read-only Cypher queries over a biomedical knowledge graph.";
  request.slots = {{"schema", schema_text}, {"question", question}};
  request.user = cypher_template.fill(request.slots);
  return strip_code_fence(backend.complete(request));
}

std::string format_context(const PropertyGraph& graph, const cypher::ResultTable& table, std::size_t row_cap) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += '\t';
    out += escape_cell(table.columns[c]);
  }
  out += '\n';
  const std::size_t shown = std::min(row_cap, table.rows.size());
  for (std::size_t r = 0; r < shown; ++r) {
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      if (c) out += '\t';
      out += escape_cell(cypher::cell_text(graph, table.rows[r][c]));
    }
    out += '\n';
  }
  if (table.rows.size() > shown) out += "\xE2\x80\xA6(+" + std::to_string(table.rows.size() - shown) + " more)\n";
  return out;
}

std::vector<std::string> context_chunks(const PropertyGraph& graph, const cypher::ResultTable& table,
                                        std::size_t row_cap) {
  std::vector<std::string> out;
  const std::size_t shown = std::min(row_cap, table.rows.size());
  for (std::size_t r = 0; r < shown; ++r) {
    std::string chunk;
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      if (c) chunk += "; ";
      chunk += table.columns[c] + ": " + cypher::cell_text(graph, table.rows[r][c]);
    }
    out.push_back(std::move(chunk));
  }
  return out;
}

std::string to_string(QaStatus status) {
  switch (status) {
    case QaStatus::Success: return "success";
    case QaStatus::ExhaustedRepairs: return "exhausted_repairs";
    case QaStatus::BackendFailure: return "backend_failure";
  }
  return "unknown";
}

QaPipeline::QaPipeline(const PropertyGraph& graph, PromptTemplates templates, AskOptions options)
    : graph_(graph),
      templates_(std::move(templates)),
      options_(options),
      schema_(cypher::SchemaDescriptor::of(graph)),
      schema_text_(cypher::render_schema(schema_)) {}

QaExchange QaPipeline::ask(LlmBackend& backend, const std::string& question) const {
  using clock = std::chrono::steady_clock;
  QaExchange ex;
  ex.question = question;
  ex.context_row_cap = options_.context_row_cap;

  try {
    auto t = clock::now();
    std::string query_text = generate_cypher(backend, templates_.cypher_generation, schema_text_, question);
    ex.timings.generate_ms += ms_since(t);

    const int max_attempts = 1 + std::max(0, options_.max_repairs);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
      Attempt a;
      a.query_text = query_text;
      std::string problem;
      t = clock::now();
      try {
        auto ast = sanitize(query_text);
        const auto warnings = cypher::validate(ast, schema_);
        for (const auto& w : warnings) a.warnings.push_back(cypher::to_string(w));
        for (const auto& w : warnings) {
          if (w.kind == cypher::SchemaWarning::Kind::UnknownLabel) {
            a.outcome = "UnknownLabel";
            problem = "Unknown node label " + w.name + ". Known node labels: " + known_names(schema_.node_keys) + ".";
            break;
          }
          if (w.kind == cypher::SchemaWarning::Kind::UnknownRelType) {
            a.outcome = "UnknownRelType";
            problem = "Unknown relationship type " + w.name + ". Known relationship types: " +
                      known_names(schema_.rel_keys) + ".";
            break;
          }
        }
        ex.timings.validate_ms += ms_since(t);
        if (problem.empty()) {
          t = clock::now();
          auto table = cypher::evaluate(graph_, ast, options_.eval);
          ex.timings.execute_ms += ms_since(t);
          a.outcome = "ok";
          ex.attempts.push_back(std::move(a));
          ex.executed_cypher = cypher::render(ast);
          ex.executed_query = std::move(ast);
          ex.context = std::move(table);
          break;
        }
      } catch (const BackendError&) {
        throw;
      } catch (const Error& e) {
        ex.timings.validate_ms += ms_since(t);
        a.outcome = e.code();
        problem = e.what();
      }
      a.detail = problem;
      ex.attempts.push_back(std::move(a));
      if (attempt + 1 == max_attempts) break;

      CompletionRequest repair;
      repair.purpose = Purpose::Repair;
      repair.system = "You fix read-only Cypher queries so that they run against the given graph.";
      repair.slots = {{"question", question}, {"bad_query", query_text}, {"error", problem}};
      repair.user = templates_.repair.fill(repair.slots);
      t = clock::now();
      query_text = strip_code_fence(backend.complete(repair));
      ex.timings.generate_ms += ms_since(t);
    }

    if (!ex.executed_query) {
      ex.status = QaStatus::ExhaustedRepairs;
      ex.error_code = "ExhaustedRepairs";
      ex.error_message = "no valid query after " + std::to_string(ex.attempts.size()) + " attempts";
      return ex;
    }

    ex.context_text = format_context(graph_, ex.context, options_.context_row_cap);
    ex.context_chunks = context_chunks(graph_, ex.context, options_.context_row_cap);
    CompletionRequest answer;
    answer.purpose = Purpose::Answer;
    answer.system = "You answer questions about a biomedical knowledge graph using only the supplied query results.";
    answer.slots = {{"question", question}, {"context", ex.context_text}};
    answer.user = templates_.answer_synthesis.fill(answer.slots);
    answer.slots["chunks_json"] = json(ex.context_chunks).dump();
    t = clock::now();
    ex.answer = trim(backend.complete(answer));
    ex.timings.answer_ms = ms_since(t);
    ex.status = QaStatus::Success;
  } catch (const BackendError& e) {
    ex.status = QaStatus::BackendFailure;
    ex.error_code = e.code();
    ex.error_message = e.what();
    ex.answer.clear();
  } catch (const Error& e) {
    // Template problems and the like; reported, never thrown.
    ex.status = QaStatus::BackendFailure;
    ex.error_code = e.code();
    ex.error_message = e.what();
    ex.answer.clear();
  }
  return ex;
}

QaExchange ask(LlmBackend& backend, const PropertyGraph& graph, const PromptTemplates& templates,
               const std::string& question, const AskOptions& options) {
  return QaPipeline(graph, templates, options).ask(backend, question);
}

json value_to_json(const PropertyGraph& graph, const Value& value) {
  return std::visit(
      [&](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Null>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, NodeRef>) {
          const auto& n = graph.node(v.id);
          json props = json::object();
          for (const auto& [k, s] : n.properties) props[k] = value_to_json(graph, Value::from_scalar(s));
          return json{{"id", to_string(v.id)}, {"label", n.label}, {"properties", props}};
        } else if constexpr (std::is_same_v<T, EdgeRef>) {
          const auto& e = graph.edge(v.id);
          json props = json::object();
          for (const auto& [k, s] : e.properties) props[k] = value_to_json(graph, Value::from_scalar(s));
          return json{{"id", to_string(v.id)},
                      {"type", e.rel_type},
                      {"source", to_string(e.source)},
                      {"target", to_string(e.target)},
                      {"properties", props}};
        } else if constexpr (std::is_same_v<T, Value::List>) {
          json arr = json::array();
          for (const auto& item : v) arr.push_back(value_to_json(graph, item));
          return arr;
        } else {
          return v;
        }
      },
      value.data);
}

json to_json(const QaExchange& ex, const PropertyGraph& graph, bool with_timings) {
  json attempts = json::array();
  for (const auto& a : ex.attempts) {
    json entry{{"query", a.query_text}, {"outcome", a.outcome}};
    if (!a.detail.empty()) entry["detail"] = a.detail;
    if (!a.warnings.empty()) entry["warnings"] = a.warnings;
    attempts.push_back(std::move(entry));
  }
  json rows = json::array();
  for (const auto& row : ex.context.rows) {
    json r = json::array();
    for (const auto& v : row) r.push_back(value_to_json(graph, v));
    rows.push_back(std::move(r));
  }
  json out{{"question", ex.question},
           {"status", to_string(ex.status)},
           {"attempts", attempts},
           {"cypher", ex.executed_query ? json(ex.executed_cypher) : json(nullptr)},
           {"columns", ex.context.columns},
           {"context_rows", rows},
           {"context", ex.context_text},
           {"context_row_cap", ex.context_row_cap},
           {"answer", ex.answer}};
  if (ex.status != QaStatus::Success) out["error"] = {{"code", ex.error_code}, {"message", ex.error_message}};
  if (with_timings) {
    out["timings_ms"] = {{"generate", ex.timings.generate_ms},
                         {"validate", ex.timings.validate_ms},
                         {"execute", ex.timings.execute_ms},
                         {"answer", ex.timings.answer_ms}};
  }
  return out;
}

}  // namespace hecix::qa
