#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynmed {

// Every failure raised by the library derives from Error. The two broad
// categories map onto the command line exit codes (2 and 3).
enum class ErrorCategory { validation, numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCategory::validation, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorCategory::numerical, what) {}
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NonFiniteValue : public ValidationError {
 public:
  NonFiniteValue(int subject, int stage, const std::string& field)
      : ValidationError("non-finite " + field + " at subject " +
                        std::to_string(subject) + ", stage " +
                        std::to_string(stage)),
        subject_(subject),
        stage_(stage) {}
  int subject() const noexcept { return subject_; }
  int stage() const noexcept { return stage_; }

 private:
  int subject_;
  int stage_;
};

class CyclicGraph : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class RaggedPanel : public ValidationError {
 public:
  RaggedPanel(std::int64_t id, int stage)
      : ValidationError("subject " + std::to_string(id) +
                        " is missing stage " + std::to_string(stage)),
        id_(id),
        stage_(stage) {}
  std::int64_t id() const noexcept { return id_; }
  int stage() const noexcept { return stage_; }

 private:
  std::int64_t id_;
  int stage_;
};

class DuplicateRow : public ValidationError {
 public:
  DuplicateRow(std::int64_t id, int stage)
      : ValidationError("duplicate row for subject " + std::to_string(id) +
                        ", stage " + std::to_string(stage)),
        id_(id),
        stage_(stage) {}
  std::int64_t id() const noexcept { return id_; }
  int stage() const noexcept { return stage_; }

 private:
  std::int64_t id_;
  int stage_;
};

class InsufficientPoints : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Design matrix without full column rank. `columns` lists the offending
// design columns (0 = intercept when one is included).
class RankDeficient : public NumericalError {
 public:
  RankDeficient(const std::string& what, std::vector<int> columns,
                std::optional<int> stage = std::nullopt,
                std::optional<int> mediator = std::nullopt)
      : NumericalError(what),
        columns_(std::move(columns)),
        stage_(stage),
        mediator_(mediator) {}

  const std::vector<int>& columns() const noexcept { return columns_; }
  std::optional<int> stage() const noexcept { return stage_; }
  std::optional<int> mediator() const noexcept { return mediator_; }

  // Same failure, annotated with where in the pipeline it happened.
  RankDeficient at(int stage, std::optional<int> mediator = std::nullopt) const {
    std::string msg = "stage " + std::to_string(stage + 1);
    if (mediator) msg += ", mediator " + std::to_string(*mediator + 1);
    return RankDeficient(msg + ": " + what(), columns_, stage, mediator);
  }

 private:
  std::vector<int> columns_;
  std::optional<int> stage_;
  std::optional<int> mediator_;
};

class SingularStructure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonStationaryModel : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class MissingQuantity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BootstrapFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace dynmed
