#pragma once

#include <stdexcept>
#include <string>

namespace shellpinn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  /// Short machine-readable category ("evaluation", "geometry", "config", ...).
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// A primitive was evaluated outside its domain (sqrt of a negative, ...).
class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& m) : Error("evaluation", m) {}
};

class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& m) : Error("geometry", m) {}
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& m)
      : Error("config", m), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& m) : Error("schema", m) {}
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& m) : Error("training", m) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& m) : Error("dimension", m) {}
};

}  // namespace shellpinn
