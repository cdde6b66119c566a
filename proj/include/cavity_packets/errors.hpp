#pragma once

#include <stdexcept>
#include <string>

namespace cavity_packets {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration. The message names the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested Fock index does not fit below the photon cutoff.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Population reached the top photon levels during a run.
class TruncationOverflow : public Error {
 public:
  using Error::Error;
};

/// Norm or trace drifted, or dt violates the stability rule.
class StepUnstable : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// A probability came out more negative than roundoff can explain.
class PositivityViolation : public Error {
 public:
  using Error::Error;
};

class GridTooSmall : public Error {
 public:
  using Error::Error;
};

class NonuniformGrid : public Error {
 public:
  using Error::Error;
};

/// |delta| coincides with 2f where the dressed-state coefficients diverge.
class PoleAtTwoF : public Error {
 public:
  using Error::Error;
};

/// Effective oscillator frequency is imaginary on the requested branch.
class UnstableBranch : public Error {
 public:
  using Error::Error;
};

}  // namespace cavity_packets
