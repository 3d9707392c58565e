#pragma once

#include <stdexcept>
#include <string>

namespace onlinetrial {

// Invalid argument values (p-values outside [0,1], non-positive sample
// sizes, malformed parameters).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid trial/study configuration (inconsistent entry times, non-integer
// accrual rate, unknown config keys, procedure/entry mismatches).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a procedure is asked to test more hypotheses than its
// pre-specified horizon allows.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace onlinetrial
