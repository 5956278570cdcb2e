// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace b2dr {

/// Root of every error raised by the library. CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (scenario, config, step log).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid input that violates a domain invariant.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Shape or dimension disagreement between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Renderer backend failure; message is prefixed with the backend id.
class BackendError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public BackendError {
 public:
  using BackendError::BackendError;
};

class TimeoutError : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace b2dr
