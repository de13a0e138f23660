#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace srml {

// Root of every failure the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WellFormednessError : public Error {
 public:
  WellFormednessError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class PathSyntaxError : public Error {
 public:
  PathSyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Parent step applied at the document root.
class NavigationError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class RuleSyntaxError : public Error {
 public:
  using Error::Error;
};

class TemplateSyntaxError : public Error {
 public:
  TemplateSyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

enum class EvalErrorKind {
  path_unresolved,
  type,
  not_numeric,
  division_by_zero,
  non_finite,
};

inline const char* to_string(EvalErrorKind kind) noexcept {
  switch (kind) {
    case EvalErrorKind::path_unresolved: return "path-unresolved";
    case EvalErrorKind::type: return "type";
    case EvalErrorKind::not_numeric: return "not-numeric";
    case EvalErrorKind::division_by_zero: return "division-by-zero";
    case EvalErrorKind::non_finite: return "non-finite";
  }
  return "unknown";
}

class EvalError : public Error {
 public:
  EvalError(EvalErrorKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  EvalErrorKind kind() const noexcept { return kind_; }

 private:
  EvalErrorKind kind_;
};

// Unreadable or unwritable file.
class IoError : public Error {
 public:
  using Error::Error;
};

class IngestError : public Error {
 public:
  using Error::Error;
};

// Dangling foreign key or an operation addressing a row that is not there.
class ContextError : public Error {
 public:
  using Error::Error;
};

class CycleError : public Error {
 public:
  using Error::Error;
};

}  // namespace srml
