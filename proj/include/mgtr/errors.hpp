#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mgtr {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A control transistor was asked to act as a resistor while not in triode.
class NotInTriodeError : public std::runtime_error {
 public:
  NotInTriodeError(std::string branch, const std::string& what)
      : std::runtime_error(what), branch_(std::move(branch)) {}
  const std::string& branch() const noexcept { return branch_; }

 private:
  std::string branch_;
};

/// Bias solver ran out of iterations.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::string branch, const std::string& what)
      : std::runtime_error(what), branch_(std::move(branch)) {}
  const std::string& branch() const noexcept { return branch_; }

 private:
  std::string branch_;
};

/// Denominator of a Volterra kernel vanished.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration document failed validation. Carries every violation found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Two-tone sweep has too few points between the noise floor and compression.
class SweepRangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No knob setting inside the search box produced a solvable design.
class NoFeasibleCancellation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mgtr
