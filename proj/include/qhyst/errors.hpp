#pragma once

#include <stdexcept>

namespace qhyst {

// Invalid input or configuration. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failure inside a running chain or experiment (non-finite objective,
// cache drift, aborted cycle). The CLI maps this to exit code 3.
class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qhyst
