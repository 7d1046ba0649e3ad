#pragma once

#include <stdexcept>
#include <string>

namespace cak {

// Malformed or ill-typed input: bad files, unknown variables, violated
// preconditions. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// An enumeration would exceed a configured size cap.
class SizeLimitError : public InputError {
 public:
  explicit SizeLimitError(const std::string& what) : InputError(what) {}
};

// Evaluation failed (table miss, overflow, unbound variable).
class EvaluationError : public std::runtime_error {
 public:
  explicit EvaluationError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace cak
