// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace growthsim {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad network, bad stop condition, out-of-domain argument.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A reaction fired on a configuration that lacks its reactants.
class NotApplicable : public Error {
 public:
  using Error::Error;
};

/// A species count left the 64-bit unsigned range.
class CountOverflow : public Error {
 public:
  using Error::Error;
};

/// Text input (reaction file, circuit file, config file) failed to parse.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Closed-form bound evaluated outside the parameter domain of its lemma.
class DomainViolation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Dual-rail signals that should be disjoint share a species.
class SignalOverlap : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Requested signal encoding violates (n, gap)-correctness.
class GapViolation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// File I/O failure, always carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace growthsim
