#pragma once

#include <stdexcept>
#include <string>

namespace dhypr {

// Root of every error the library throws. kind() is a stable, machine-readable
// tag used by the CLI when it serializes failures as JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Caller broke a documented precondition (shape, dimension, index range).
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error("contract_violation", what) {}
};

// A forward operation produced NaN or Inf.
class NumericError : public Error {
 public:
  NumericError(std::string op, const std::string& what)
      : Error("numeric_error", what), op_(std::move(op)) {}
  const std::string& op() const noexcept { return op_; }

 private:
  std::string op_;
};

// Input files could not be turned into a valid digraph.
class IngestionError : public Error {
 public:
  explicit IngestionError(const std::string& what) : Error("ingestion_error", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};

class TrainingError : public Error {
 public:
  TrainingError(int epoch, const std::string& what)
      : Error("training_error", what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

// Metric requested on input where it is not defined (e.g. AUC with one class).
class MetricError : public Error {
 public:
  explicit MetricError(const std::string& what) : Error("undefined_metric", what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format_error", what) {}
};

}  // namespace dhypr
