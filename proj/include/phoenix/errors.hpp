#pragma once

#include <stdexcept>
#include <string>

namespace phoenix {

// Base for all phoenix errors so callers can catch one type at the CLI
// boundary. Subclasses carry a module-specific kind enum.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class TreebankError : public Error {
 public:
  enum class Kind { UnbalancedBrackets, EmptyTree, MalformedNode };

  TreebankError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class DictionaryError : public Error {
 public:
  enum class Kind { MissingFile, FormatError, InvalidCode };

  DictionaryError(Kind kind, const std::string& file, int line,
                  const std::string& reason)
      : Error(file + (line > 0 ? ":" + std::to_string(line) : "") + ": " +
              reason),
        kind_(kind),
        file_(file),
        line_(line) {}

  Kind kind() const { return kind_; }
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  std::string file_;
  int line_;
};

class CoderError : public Error {
 public:
  enum class Kind { NoParses };

  CoderError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class EnrichError : public Error {
 public:
  enum class Kind { UnknownRoot, MalformedCode, FormatError };

  EnrichError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class StoreError : public Error {
 public:
  enum class Kind { StoreCorruption, InvalidTransition, IoError };

  StoreError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class IngestError : public Error {
 public:
  enum class Kind { NoContent, BadConfig };

  IngestError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class PipelineError : public Error {
 public:
  enum class Kind { NoInput, UnknownKind, MalformedRecords, InvalidDate };

  PipelineError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace phoenix
