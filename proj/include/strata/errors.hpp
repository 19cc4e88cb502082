#ifndef STRATA_ERRORS_HPP
#define STRATA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace strata {

/// Bad arguments, violated parameter windows, malformed configs.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation not defined for the given group/order combination.
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Two routes that must agree algebraically did not.
class InternalConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best)
      : std::runtime_error(what + " (best value " + std::to_string(best) + ")"), best_(best) {}
  double best() const { return best_; }

 private:
  double best_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InputError(message);
}

}  // namespace strata

#endif  // STRATA_ERRORS_HPP
