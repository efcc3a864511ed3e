#pragma once

#include <stdexcept>
#include <string>

namespace labprod {

// Failure categories map onto stable CLI exit codes.
enum class ErrorCategory { config, data, numerical };

inline int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::data: return 3;
    case ErrorCategory::numerical: return 4;
  }
  return 1;
}

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::data: return "data";
    case ErrorCategory::numerical: return "numerical";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define LABPROD_DEFINE_ERROR(Name, Category)                         \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(Category, what) {} \
  };

LABPROD_DEFINE_ERROR(ConfigError, ErrorCategory::config)
LABPROD_DEFINE_ERROR(ContextError, ErrorCategory::config)
LABPROD_DEFINE_ERROR(SchemaError, ErrorCategory::data)
LABPROD_DEFINE_ERROR(UnitError, ErrorCategory::data)
LABPROD_DEFINE_ERROR(ConflictError, ErrorCategory::data)
LABPROD_DEFINE_ERROR(IncompleteRecordError, ErrorCategory::data)
LABPROD_DEFINE_ERROR(ZeroWorkersError, ErrorCategory::data)
LABPROD_DEFINE_ERROR(InsufficientDataError, ErrorCategory::data)
LABPROD_DEFINE_ERROR(EmptySeriesError, ErrorCategory::data)
LABPROD_DEFINE_ERROR(DegenerateShareError, ErrorCategory::numerical)
LABPROD_DEFINE_ERROR(CollinearityError, ErrorCategory::numerical)
LABPROD_DEFINE_ERROR(ZeroVarianceError, ErrorCategory::numerical)
LABPROD_DEFINE_ERROR(DivisionDegeneracyError, ErrorCategory::numerical)
LABPROD_DEFINE_ERROR(UnboundedDemandError, ErrorCategory::numerical)

#undef LABPROD_DEFINE_ERROR

// Bad input row; carries the 1-based physical line number.
class RowError : public Error {
 public:
  RowError(std::size_t line, const std::string& what)
      : Error(ErrorCategory::data, "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace labprod
