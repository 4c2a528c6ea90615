#pragma once

#include <stdexcept>
#include <string>

namespace bgx {

/// Precondition violated by the caller (bad shape, mode, parameter range).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data is unusable (non-finite values, degenerate content).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A frame sequence could not be ingested; the message names the file.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing an artifact failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The ADM iteration produced non-finite values.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace bgx
