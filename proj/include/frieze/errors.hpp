#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace frieze {

// Malformed or semantically invalid user input (bad spec, bad pattern, eps <= 0, unreadable file).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Index outside an observer window.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A resource limit was exceeded; `limit()` reports the configured bound.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what, std::uint64_t limit)
      : std::runtime_error(what), limit_(limit) {}
  std::uint64_t limit() const noexcept { return limit_; }

 private:
  std::uint64_t limit_;
};

// The density hypothesis could not be established, so no certificate is issued.
class CertificateRefused : public std::runtime_error {
 public:
  CertificateRefused(const std::string& what, std::string verdict)
      : std::runtime_error(what), verdict_(std::move(verdict)) {}
  const std::string& verdict() const noexcept { return verdict_; }

 private:
  std::string verdict_;
};

// The convergence onset n0 could not be found within the horizon.
class CertificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace frieze
