#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace appsquat {

// Caller-side mistakes: bad arguments, broken preconditions, unknown names.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input bytes that are not well-formed UTF-8 or not well-formed JSON.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Well-formed input whose content breaks the record schema.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pipeline stage (usually an embedding provider) failed at runtime.
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The embedding sidecar answered, but the answer violates the wire contract.
class ProtocolError : public PipelineError {
 public:
  using PipelineError::PipelineError;
};

}  // namespace appsquat
