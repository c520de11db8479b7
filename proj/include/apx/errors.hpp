#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace apx {

/// Malformed user input (spec files, point files, flags). Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A windowed sample admits no bounded translation set.
class NotApproximateSubgroup : public std::runtime_error {
 public:
  NotApproximateSubgroup(const std::string& what, Eigen::VectorXd witness)
      : std::runtime_error(what), witness_(std::move(witness)) {}
  const Eigen::VectorXd& witness() const { return witness_; }

 private:
  Eigen::VectorXd witness_;
};

/// The window does not contain enough of the set to run an analysis.
class WindowTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A descent step failed its guaranteed decrease.
class DescentFailure : public std::runtime_error {
 public:
  DescentFailure(const std::string& what, double deficit)
      : std::runtime_error(what), deficit_(deficit) {}
  double deficit() const { return deficit_; }

 private:
  double deficit_;
};

/// Every pair of projected points commutes: ω vanishes on π_V(Λ).
class DegenerateForm : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace apx
