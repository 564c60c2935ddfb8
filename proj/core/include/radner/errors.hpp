#pragma once

#include <stdexcept>
#include <string>

namespace radner {

/// Invalid market or model input (non-finite targets, I < 2, bad tables).
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A time or value outside the domain an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An invariant the construction guarantees did not hold; signals a bug upstream.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The operation is not defined for this model (e.g. slopes of a kinked gamma).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace radner
