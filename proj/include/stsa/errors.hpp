#pragma once

#include <stdexcept>
#include <string>

namespace stsa {

// Base class for every error thrown by this library. The CLI maps these to
// exit code 1 (data errors); command-line misuse is handled separately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Constant or too-short signal where variation is required.
class DegenerateSignal : public Error {
 public:
  using Error::Error;
};

// Partition cells would collapse: fewer distinct values than cells, or a
// cell that would contain no fitting samples.
class TooFewDistinctValues : public Error {
 public:
  using Error::Error;
};

// Symbol sequence shorter than an operation's minimum length.
class SequenceTooShort : public Error {
 public:
  using Error::Error;
};

// alphabet_size^depth exceeds the configured state cap.
class DepthTooLarge : public Error {
 public:
  using Error::Error;
};

// Matrix rows do not form probability distributions.
class NotStochastic : public Error {
 public:
  using Error::Error;
};

// Iterative solver exhausted its iteration budget.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// Vectors of different lengths where equal lengths are required.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Probability vector entry that is zero or negative.
class NonPositiveEntry : public Error {
 public:
  using Error::Error;
};

// Models with incompatible depth or alphabet.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// Malformed serialized object (partition spec, chain spec, model, config).
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

// Out-of-range or inconsistent parameters.
class InvalidParams : public Error {
 public:
  using Error::Error;
};

// File that cannot be read, written, or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace stsa
