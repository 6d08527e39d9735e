#pragma once

#include <stdexcept>
#include <string>

namespace densray {

// Errors are grouped by who has to fix them; the CLI maps each group to an
// exit code (usage 1, data 2, numeric 3).

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or violated preconditions on caller-supplied parameters.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (files, tokens, lexicons).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-convergence, divergence or loss of orthogonality.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace densray
