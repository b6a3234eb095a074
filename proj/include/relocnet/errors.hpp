#pragma once

#include <stdexcept>
#include <string>

namespace relocnet {

/// Invalid value fed to a numeric operation (degenerate quaternion, bad
/// rotation matrix, ...).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dataset parsing / loading failure. CLI exit code 2.
struct IngestionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An internal contract was violated (shape mismatch, inconsistent report).
/// CLI exit code 4.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace relocnet
