#pragma once

#include <stdexcept>
#include <string>

namespace polymin {

/// Malformed or inconsistent input (bad file, dimension mismatch, invalid flag).
struct input_error : std::runtime_error {
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// An enumeration or table size exceeded its configured cap.
struct cap_exceeded : std::runtime_error {
  explicit cap_exceeded(const std::string& what) : std::runtime_error(what) {}
};

/// A value oracle returned a non-finite value or exceeded its declared bound.
struct oracle_contract_violation : std::runtime_error {
  explicit oracle_contract_violation(const std::string& what)
      : std::runtime_error(what) {}
};

/// A required structural precondition (e.g. submodularity) failed verification.
struct check_failed : std::runtime_error {
  explicit check_failed(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polymin
