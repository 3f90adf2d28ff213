#pragma once

#include <stdexcept>
#include <string>

namespace coop {

// A Jacobian that must be inverted is too ill-conditioned.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

// The closed loop left the configured velocity bound or produced non-finite values.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario file is malformed or violates an invariant. `field()` is the
// dotted path of the offending entry, e.g. "controller.load_sharing".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace coop
