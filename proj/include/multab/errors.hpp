#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace multab {

/// Bad argument value (violated precondition on an input).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input lies outside a precomputed table (e.g. above the sieve limit).
class OutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Real-valued function evaluated outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedDimension : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation would need more memory/work than the configured budget.
class ResourceLimit : public std::runtime_error {
 public:
  ResourceLimit(const std::string& what, std::uint64_t required)
      : std::runtime_error(what), required_(required) {}

  /// Amount that would have been required (bytes for memory budgets,
  /// element counts for enumeration budgets).
  std::uint64_t required() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

/// Divisor-chain enumeration refused because tau exceeds the cap.
class EnumerationOverflow : public ResourceLimit {
 public:
  EnumerationOverflow(std::uint64_t tau, std::uint64_t cap)
      : ResourceLimit("divisor chain count " + std::to_string(tau) +
                          " exceeds enumeration cap " + std::to_string(cap),
                      tau),
        cap_(cap) {}

  std::uint64_t tau() const noexcept { return required(); }
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t cap_;
};

}  // namespace multab
