#pragma once

#include <stdexcept>
#include <string>

namespace tokkit {

/// Base class for all toolkit errors. User-facing failures derive from this;
/// broken internal invariants throw InternalError instead.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (bad sizes, mismatched lengths, ...).
class InvalidArgumentError : public Error {
public:
  using Error::Error;
};

/// Reference to a token id that is not active in the vocabulary.
class InvalidTokenError : public Error {
public:
  using Error::Error;
};

/// Bad configuration: unknown signal name, non-dividing band count, pattern
/// that does not compile, and similar.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A corpus domain was given with no documents.
class DomainEmptyError : public Error {
public:
  using Error::Error;
};

/// Document text was empty after normalization.
class EmptyDocumentError : public Error {
public:
  using Error::Error;
};

/// Document too short for the requested shingle length.
class TooShortError : public Error {
public:
  using Error::Error;
};

/// Wire-format text that cannot be parsed or rendered.
class MalformedError : public Error {
public:
  explicit MalformedError(const std::string& what, size_t byte_offset = 0)
      : Error(what), byte_offset(byte_offset) {}
  size_t byte_offset;
};

/// Message content that cannot be represented on the chat wire.
class ContentViolationError : public Error {
public:
  using Error::Error;
};

/// Reasoning content supplied while rendering in non-reasoning mode.
class ModeConflictError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// An internal invariant did not hold. Maps to CLI exit code 2.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace tokkit
