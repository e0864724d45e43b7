#pragma once

#include <stdexcept>
#include <string>

namespace srm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed JSON, invariant violations, bad CLI arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Solver divergence, singular systems, simulation blow-up.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A consistency check ran to completion and found a mismatch.
class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace srm
