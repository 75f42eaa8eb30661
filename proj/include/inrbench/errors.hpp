#pragma once

#include <stdexcept>
#include <string>

namespace inrb {

struct BuildError : std::runtime_error {
  explicit BuildError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TrainingDiverged : std::runtime_error {
  long step;
  explicit TrainingDiverged(long step_, const std::string& msg)
      : std::runtime_error(msg), step(step_) {}
};

struct BudgetInfeasible : std::runtime_error {
  explicit BudgetInfeasible(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  long byte_offset;
  explicit IoError(const std::string& msg, long offset = -1)
      : std::runtime_error(msg), byte_offset(offset) {}
};

struct DegenerateSignal : std::runtime_error {
  explicit DegenerateSignal(const std::string& msg) : std::runtime_error(msg) {}
};

struct Unsupported : std::runtime_error {
  explicit Unsupported(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace inrb
