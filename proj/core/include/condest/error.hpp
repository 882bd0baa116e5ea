#pragma once

#include <stdexcept>
#include <string>

namespace condest {

// Bad input: malformed weights, out-of-range ids or parameters.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when a shared sample budget would be exceeded.
class BudgetExhausted : public std::runtime_error {
 public:
  explicit BudgetExhausted(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace condest
