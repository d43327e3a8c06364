#pragma once

#include <stdexcept>
#include <string>

namespace mgc {

// Malformed or inconsistent input data (duplicate node ids, bad records).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-range numeric parameter (alpha <= 0, theta outside (0,1), ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation applied outside its mathematical support, e.g. the posterior of
// a non-minimal clustering.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnknownAddressError : public std::out_of_range {
 public:
  explicit UnknownAddressError(const std::string& address)
      : std::out_of_range("unknown address: " + address), address_(address) {}

  const std::string& address() const noexcept { return address_; }

 private:
  std::string address_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mgc
