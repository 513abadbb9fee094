#pragma once

#include <stdexcept>
#include <string>

namespace bpielm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Derivative order outside the closed-form table (total order > 3).
class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

/// Assembly produced no rows at all.
class EmptySystem : public Error {
 public:
  using Error::Error;
};

/// Factorization or decomposition failed, typically on non-finite input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Posterior mean collapsed to exactly zero, so the prior precision update divides by zero.
class DegenerateFit : public Error {
 public:
  using Error::Error;
};

/// Effective number of parameters reached the number of rows.
class IllPosedEvidence : public Error {
 public:
  using Error::Error;
};

class NoParameters : public Error {
 public:
  using Error::Error;
};

}  // namespace bpielm
