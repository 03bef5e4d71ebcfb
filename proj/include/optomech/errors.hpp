#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

// Bad arguments: inverted bounds, non-increasing grids, broken invariants.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Formula evaluated outside its domain (e.g. imprecision at zero power).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fitting input carries no usable structure (flat window, too few bins).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration; key() names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

namespace detail {
inline void require(bool ok, const char* message) {
  if (!ok) throw InputError(message);
}
}  // namespace detail

}  // namespace optomech
