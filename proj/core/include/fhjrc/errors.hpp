// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fhjrc {

// Error categories surfaced by the CLI as machine-readable exit states.
enum class ErrorCategory { config, domain, input, format, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

// Invalid or inconsistent configuration values.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

// Input has the wrong length or dimensions (payload exhausted, frame mismatch).
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorCategory::input, what) {}
};

// Malformed file contents.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(ErrorCategory::format, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

const char* to_string(ErrorCategory category) noexcept;

}  // namespace fhjrc
