#pragma once

#include <stdexcept>
#include <string>

namespace ecc {

// Bad structure or dimensions in a model, adapter, plan or policy.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// API misuse: wrong tap, empty batch, mismatched shapes passed by a caller.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A training stage produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string stage, int epoch)
      : std::runtime_error("training diverged in stage '" + stage + "' at epoch " +
                           std::to_string(epoch)),
        stage_(std::move(stage)),
        epoch_(epoch) {}

  const std::string& stage() const { return stage_; }
  int epoch() const { return epoch_; }

 private:
  std::string stage_;
  int epoch_;
};

// An internal contract was broken (e.g. a frozen parameter changed).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ecc
