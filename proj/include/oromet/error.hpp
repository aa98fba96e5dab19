#pragma once

#include <stdexcept>
#include <string>

namespace oromet {

/// Coarse failure categories; the CLI maps each to a distinct exit code.
enum class ErrorCategory {
  Usage,
  Validation,
  Transport,
  Parse,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

private:
  ErrorCategory category_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& message)
      : Error(ErrorCategory::Validation, message) {}
};

struct TransportError : Error {
  explicit TransportError(const std::string& message)
      : Error(ErrorCategory::Transport, message) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& message)
      : Error(ErrorCategory::Parse, message) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& message)
      : Error(ErrorCategory::Internal, message) {}
};

/// Optimizer failed to reach the gradient tolerance within the iteration cap.
struct ConvergenceError : InternalError {
  ConvergenceError(const std::string& message, double gradient_norm)
      : InternalError(message), gradient_norm(gradient_norm) {}

  double gradient_norm;
};

}  // namespace oromet
