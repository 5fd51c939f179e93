#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lne {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain input. The CLI maps this family to exit code 2.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A formula would evaluate outside its domain at specific states
/// (a zero prior under a negative exponent, an unresolvable bracket, ...).
class DomainError : public InvalidArgument {
 public:
  DomainError(const std::string& what, std::vector<std::size_t> states)
      : InvalidArgument(what), states_(std::move(states)) {}

  const std::vector<std::size_t>& states() const noexcept { return states_; }

 private:
  std::vector<std::size_t> states_;
};

/// Two weight vectors that must carry the same total mass do not.
class MassMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A constraint function that is constant over the states it applies to.
class DegenerateConstraint : public InvalidArgument {
 public:
  DegenerateConstraint(const std::string& what, std::size_t index)
      : InvalidArgument(what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Constraint targets that no distribution can meet. CLI exit code 4.
class Infeasible : public Error {
 public:
  using Error::Error;
};

}  // namespace lne
