#pragma once

#include <stdexcept>
#include <string>

namespace dsfm {

// Failure categories; the CLI maps these to exit codes and a machine-readable
// "error category=... message=..." line on stderr.
enum class ErrorCategory {
  invalid_input,
  parse,
  validation,
  capability,
  oracle_exactness,
  convergence,
  internal,
};

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::invalid_input: return "invalid_input";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::capability: return "capability";
    case ErrorCategory::oracle_exactness: return "oracle_exactness";
    case ErrorCategory::convergence: return "convergence";
    case ErrorCategory::internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, const std::string& msg)
      : std::runtime_error(msg), cat_(cat) {}
  ErrorCategory category() const { return cat_; }

 private:
  ErrorCategory cat_;
};

[[noreturn]] inline void fail(ErrorCategory cat, const std::string& msg) {
  throw Error(cat, msg);
}

}  // namespace dsfm
