#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rafs {

// Dimension or layout mismatch between two objects.
class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A scalar argument outside the domain of an operation (non-finite input,
// non-positive variance, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// A non-finite value appeared in an intermediate computation.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, std::size_t epoch)
      : std::runtime_error(what), epoch_(epoch) {}

  std::size_t epoch() const { return epoch_; }

private:
  std::size_t epoch_;
};

// Malformed or missing input data (CSV cells, columns, counts).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string shape_message(const std::string& what, std::size_t expected,
                          std::size_t actual);

}  // namespace rafs
