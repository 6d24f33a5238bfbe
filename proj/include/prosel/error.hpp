#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prosel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, request bodies).
class InputError : public Error {
 public:
  explicit InputError(std::string message) : Error(std::move(message)) {}

  InputError(const std::string& source, std::size_t line, const std::string& message)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + message), source_(source), line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_ = 0;
};

/// One or more term identifiers are absent from the embedding store.
class UnresolvedTermsError : public InputError {
 public:
  explicit UnresolvedTermsError(std::vector<std::string> terms)
      : InputError(build_message(terms)), terms_(std::move(terms)) {}

  const std::vector<std::string>& terms() const noexcept { return terms_; }

 private:
  static std::string build_message(const std::vector<std::string>& terms) {
    std::string msg = "unresolved term(s) in embedding store:";
    for (const auto& t : terms) msg += " \"" + t + "\"";
    return msg;
  }

  std::vector<std::string> terms_;
};

/// A numeric parameter lies outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during computation (non-PSD kernel, non-convergence, ...).
class ComputeError : public Error {
 public:
  using Error::Error;
};

}  // namespace prosel
