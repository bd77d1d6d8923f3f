#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace detflow {

// Base for every error the library raises on purpose. The CLI maps these
// onto its exit codes; see tools/detflow_main.cpp.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class SingularMatrix : public Error {
 public:
  explicit SingularMatrix(const std::string& msg) : Error(msg) {}
};

class OutOfRange : public Error {
 public:
  explicit OutOfRange(const std::string& msg) : Error(msg) {}
};

// Carries every violation found, not just the first one.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "scenario validation failed:";
    for (const auto& s : issues) {
      out += " [";
      out += s;
      out += "]";
    }
    return out;
  }
  std::vector<std::string> issues_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

class StepSizeUnderflow : public Error {
 public:
  explicit StepSizeUnderflow(const std::string& msg) : Error(msg) {}
};

class NonFiniteState : public Error {
 public:
  explicit NonFiniteState(const std::string& msg) : Error(msg) {}
};

class NotHomogeneous : public Error {
 public:
  explicit NotHomogeneous(const std::string& msg) : Error(msg) {}
};

class NotLeftOnly : public Error {
 public:
  explicit NotLeftOnly(const std::string& msg) : Error(msg) {}
};

class SingularStart : public Error {
 public:
  explicit SingularStart(const std::string& msg) : Error(msg) {}
};

}  // namespace detflow
