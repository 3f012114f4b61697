#pragma once

#include <stdexcept>
#include <string>

namespace gtm {

/// Invalid or inconsistent run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical resource limit was exceeded, e.g. P-F band leakage
/// (CLI exit code 3).
class NumericalBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gtm
