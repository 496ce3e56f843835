#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rwdnn {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or vector dimensions disagree with the network architecture.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value reached a routine that requires finite input.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A configuration record violates its invariants.
class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

/// Not enough observations for the requested operation.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// The sample size is too small for a bound or schedule to be defined.
class TooSmallNError : public Error {
 public:
  using Error::Error;
};

/// Iteration produced a non-finite or exploding value.
///
/// `where` is a human-readable location (simulation step, epoch/batch).
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t epoch, std::size_t batch)
      : Error(what), epoch_(epoch), batch_(batch) {}
  explicit DivergenceError(const std::string& what) : Error(what) {}

  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t batch() const noexcept { return batch_; }

 private:
  std::size_t epoch_ = 0;
  std::size_t batch_ = 0;
};

}  // namespace rwdnn
