#pragma once

#include <stdexcept>
#include <string>

namespace dualopt {

// An algorithm needed an oracle (e.g. a conjugate argmax) the objective does not provide.
class MissingOracleError : public std::logic_error {
 public:
  explicit MissingOracleError(const std::string& what) : std::logic_error(what) {}
};

// A linear system that should be positive definite is singular.
class SingularSystemError : public std::runtime_error {
 public:
  explicit SingularSystemError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values or an iterative solve that did not reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dualopt
