#pragma once

#include <stdexcept>
#include <string>

namespace mga {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed MarkovGameSpec, policy, or tensor shape.
class SpecError : public Error {
 public:
  explicit SpecError(const std::string& what) : Error(what) {}
};

// An attack's applicability condition fails at a concrete (step, state).
class ConditionViolated : public Error {
 public:
  ConditionViolated(int step, int state, const std::string& what)
      : Error(what), step_(step), state_(state) {}
  int step() const { return step_; }
  int state() const { return state_; }

 private:
  int step_;
  int state_;
};

// Bad experiment configuration or unknown fixture/suite name.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// Failure to read or parse an input file.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace mga
