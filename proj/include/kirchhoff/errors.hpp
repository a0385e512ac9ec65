#pragma once

#include <stdexcept>
#include <string>

namespace kirchhoff {

/// Invalid user-supplied parameters (grid sizes, catalog parameters, config values).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A shifted potential dropped below 1 at some node.
class ShiftViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field/grid size mismatch or similar contract breach between modules.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No scan point produced negative energy.
class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mountain-pass path maximum sank below half the certified sphere level.
class PathCollapseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kirchhoff
