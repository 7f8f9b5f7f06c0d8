#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fiberscope {

// Base of every error thrown by the library. The CLI maps any of these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// An x-translation that is not an integer multiple of the representation grid step.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

// Evaluation at a central frequency outside the cross-section (sigma == 0).
class CrossSectionViolation : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidResidue : public Error {
 public:
  using Error::Error;
};

class DecompositionInfeasible : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Carries every validation problem found in a config, not just the first.
class ConfigError : public InvalidConfig {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : InvalidConfig(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += "; ";
      out += item;
    }
    return out;
  }

  std::vector<std::string> problems_;
};

}  // namespace fiberscope
