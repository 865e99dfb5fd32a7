#pragma once

#include <stdexcept>
#include <string>

namespace transq {

// Caller supplied something malformed: bad index, unknown method, missing
// field. The CLI maps this to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine could not produce a trustworthy value. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The model produced a rate the simulator cannot use (negative or non-finite).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ODE state became non-finite. Carries the last time at which it was finite.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, double last_good_time)
      : NumericalError(what), last_good_time_(last_good_time) {}

  [[nodiscard]] double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

}  // namespace transq
