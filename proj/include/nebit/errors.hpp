#pragma once

#include <stdexcept>
#include <string>

namespace nebit {

// Invalid argument or inconsistent input data (bad scenario, malformed
// matrix, incompatible dimensions, unknown variable, ...).
class domain_error : public std::invalid_argument {
 public:
  explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// Problem size outside the supported enumeration guards.
class size_error : public domain_error {
 public:
  explicit size_error(const std::string& what) : domain_error(what) {}
};

// A numerical procedure failed to converge or lost feasibility
// (LP iteration cap, no perfect matching on a residual support, ...).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nebit
