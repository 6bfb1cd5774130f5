#pragma once

#include <stdexcept>
#include <string>

namespace sivsim {

// Bad or contradictory run configuration (unknown keys, wrong types, ranges).
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data too small or degenerate for the requested estimate.
class insufficient_data_error : public std::runtime_error {
 public:
  explicit insufficient_data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear algebra or iteration failure that is not the caller's fault.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sivsim
