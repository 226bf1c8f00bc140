#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace stochopt {

// Thrown when a parameter block breaks its invariants. Carries every
// violation found, not just the first.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Throws ValidationError if `problems` is nonempty.
void throw_if_invalid(std::vector<std::string> problems);

}  // namespace stochopt

namespace stochopt {

// Malformed input file; the message names the file and line (and column).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stochopt
