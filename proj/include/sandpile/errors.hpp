#pragma once

#include <stdexcept>
#include <string>

namespace sandpile {

/// Raised when an exhaustive computation would exceed its configured budget.
class GuardError : public std::runtime_error {
 public:
  explicit GuardError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sandpile
