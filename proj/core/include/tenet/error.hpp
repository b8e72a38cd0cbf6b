#pragma once

#include <stdexcept>
#include <string>

namespace tenet {

// Root of every error thrown by the library. Subclasses map one-to-one onto
// the failure categories callers are expected to handle differently.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension or manifest mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Gradient requested through an operation that has no reverse rule.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// NaN or infinity produced where a finite value is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration, registry request, or split specification.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Invalid user input such as empty text or an empty trajectory.
class InputError : public Error {
 public:
  using Error::Error;
};

// Exact-match lookup miss in an embedding table.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent file contents.
class LoadError : public Error {
 public:
  using Error::Error;
};

// A prompt-conditioned baseline was asked to act without a prompt trajectory.
class MissingPromptError : public Error {
 public:
  using Error::Error;
};

// An artifact required by a command does not exist.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace tenet
