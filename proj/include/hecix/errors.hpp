#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hecix {

// Base for every error raised by the engine. code() is the machine-readable
// name used in CLI diagnostics and HTTP error payloads.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

// ---- graph-core ----------------------------------------------------------

class EmptyLabel : public Error {
public:
  EmptyLabel() : Error("EmptyLabel", "node label must be non-empty") {}
  explicit EmptyLabel(const std::string& what) : Error("EmptyLabel", what) {}
};

class IdCollision : public Error {
public:
  explicit IdCollision(const std::string& id)
      : Error("IdCollision", "identifier already in use: " + id) {}
};

class DanglingEndpoint : public Error {
public:
  explicit DanglingEndpoint(const std::string& id)
      : Error("DanglingEndpoint", "edge endpoint does not exist: " + id) {}
};

class NotFound : public Error {
public:
  explicit NotFound(const std::string& id) : Error("NotFound", "no such element: " + id) {}
};

class SnapshotCorrupt : public Error {
public:
  SnapshotCorrupt(std::size_t line, const std::string& detail)
      : Error("SnapshotCorrupt", "snapshot line " + std::to_string(line) + ": " + detail),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// ---- cypher --------------------------------------------------------------

class LexError : public Error {
public:
  LexError(std::size_t position, const std::string& detail)
      : Error("LexError", detail + " at offset " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

class ParseError : public Error {
public:
  ParseError(std::string expected, std::string found, std::size_t position)
      : Error("ParseError", "expected " + expected + " but found " + found + " at offset " +
                                std::to_string(position)),
        expected_(std::move(expected)),
        found_(std::move(found)),
        position_(position) {}

  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }
  std::size_t position() const noexcept { return position_; }

private:
  std::string expected_;
  std::string found_;
  std::size_t position_;
};

class UnboundVariable : public Error {
public:
  explicit UnboundVariable(std::string name)
      : Error("UnboundVariable", "variable not bound by any pattern: " + name),
        name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

class EvalError : public Error {
public:
  explicit EvalError(const std::string& what) : Error("EvalError", what) {}
};

class SizeLimit : public Error {
public:
  SizeLimit(std::size_t size, std::size_t bound)
      : Error("SizeLimit", "graph has " + std::to_string(size) + " nodes; oracle bound is " +
                               std::to_string(bound)) {}
};

// ---- ingest --------------------------------------------------------------

class MalformedRecord : public Error {
public:
  MalformedRecord(std::size_t line, const std::string& detail)
      : Error("MalformedRecord", "line " + std::to_string(line) + ": " + detail), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class UnknownKind : public Error {
public:
  explicit UnknownKind(const std::string& kind) : Error("UnknownKind", "unknown kind: " + kind) {}
};

class DiseaseNotFound : public Error {
public:
  DiseaseNotFound(const std::string& spec, std::vector<std::string> candidates);

  const std::vector<std::string>& candidates() const noexcept { return candidates_; }

private:
  std::vector<std::string> candidates_;
};

class MissingField : public Error {
public:
  explicit MissingField(std::string field)
      : Error("MissingField", "required field missing: " + field), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

class InputError : public Error {
public:
  explicit InputError(const std::string& what) : Error("InputError", what) {}
};

// ---- qa / eval -----------------------------------------------------------

class BackendError : public Error {
public:
  explicit BackendError(const std::string& what, bool timeout = false)
      : Error(timeout ? "BackendTimeout" : "BackendError", what), timeout_(timeout) {}

  bool timeout() const noexcept { return timeout_; }

private:
  bool timeout_;
};

class ForbiddenClause : public Error {
public:
  explicit ForbiddenClause(std::string token)
      : Error("ForbiddenClause", "query contains forbidden clause " + token),
        token_(std::move(token)) {}

  const std::string& token() const noexcept { return token_; }

private:
  std::string token_;
};

class TemplateError : public Error {
public:
  explicit TemplateError(const std::string& what) : Error("TemplateError", what) {}
};

class NotApplicable : public Error {
public:
  explicit NotApplicable(const std::string& what) : Error("NotApplicable", what) {}
};

}  // namespace hecix
