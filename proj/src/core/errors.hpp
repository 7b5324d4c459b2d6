#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ufls {

// A metric whose denominator vanished (zero positive sequence, zero load).
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Unknown ids, mismatched topologies and similar caller mistakes.
class LookupError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string message, int line, int column)
      : std::runtime_error(message + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Carries every problem found in one validation pass, in a deterministic order.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& i : issues) {
      if (!out.empty()) out += '\n';
      out += i;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

// Raised by the engine when a state value turns non-finite.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ufls

namespace ufls {

// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ufls
